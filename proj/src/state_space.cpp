#include "ndattr/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ndattr/errors.hpp"

namespace ndattr {

SpatialDiscretization::SpatialDiscretization(std::size_t modes, double length, double delta)
    : length_(length), delta_(delta) {
    if (modes < 1) throw InvalidArgument("mode_count must be >= 1");
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("domain length must be positive");
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("fractional exponent must lie in (0, 1/2)");
    eigenvalues_.resize(modes);
    fractional_weights_.resize(modes);
    for (std::size_t i = 0; i < modes; ++i) {
        const double k = static_cast<double>(i + 1);
        const double root = k * std::numbers::pi / length;
        eigenvalues_[i] = root * root;
        fractional_weights_[i] = std::pow(eigenvalues_[i], delta);
    }
}

StateVector StateVector::basis(std::size_t modes, std::size_t k) {
    if (k < 1 || k > modes) throw InvalidArgument("basis index out of range");
    StateVector e(modes);
    e[k - 1] = 1.0;
    return e;
}

namespace {
void require_same_modes(std::size_t a, std::size_t b) {
    if (a != b) throw InvalidArgument("mode-count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}
}  // namespace

StateVector& StateVector::operator+=(const StateVector& o) {
    require_same_modes(modes(), o.modes());
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
    require_same_modes(modes(), o.modes());
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

StateVector& StateVector::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

double norm_x(const StateVector& u) noexcept {
    double acc = 0.0;
    for (double v : u.coefficients()) acc += v * v;
    return std::sqrt(acc);
}

double norm_y(const StateVector& u, const SpatialDiscretization& disc) {
    require_same_modes(u.modes(), disc.modes());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.modes(); ++i) acc += disc.eigenvalue(i) * u[i] * u[i];
    return std::sqrt(acc);
}

double distance_x(const StateVector& a, const StateVector& b) {
    require_same_modes(a.modes(), b.modes());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.modes(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::size_t PointCloud::modes() const {
    if (elements.empty()) throw InvalidArgument("empty point cloud");
    const std::size_t m = elements.front().modes();
    for (const auto& e : elements) require_same_modes(m, e.modes());
    return m;
}

double PointCloud::max_norm() const noexcept {
    double best = 0.0;
    for (const auto& e : elements) best = std::max(best, norm_x(e));
    return best;
}

double hausdorff_semidist(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) throw InvalidArgument("hausdorff_semidist: empty input");
    double worst = 0.0;
    for (const auto& x : a.elements) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& y : b.elements) {
            nearest = std::min(nearest, distance_x(x, y));
            if (nearest <= worst) break;  // cannot raise the maximum
        }
        worst = std::max(worst, nearest);
    }
    return worst;
}

double hausdorff_dist(const PointCloud& a, const PointCloud& b) {
    return std::max(hausdorff_semidist(a, b), hausdorff_semidist(b, a));
}

std::vector<std::size_t> greedy_cover_indices(
    std::size_t n, double radius,
    const std::function<bool(std::size_t, std::size_t, double)>& within) {
    if (!(radius > 0.0)) throw InvalidArgument("cover radius must be positive");
    std::vector<std::size_t> centers;
    for (std::size_t i = 0; i < n; ++i) {
        bool covered = false;
        for (std::size_t c : centers) {
            if (within(i, c, radius)) {
                covered = true;
                break;
            }
        }
        if (!covered) centers.push_back(i);
    }
    return centers;
}

CoverResult greedy_cover(const PointCloud& k, double r) {
    if (!(r > 0.0)) throw InvalidArgument("greedy_cover: radius must be positive");
    if (k.empty()) throw InvalidArgument("greedy_cover: empty cloud");
    (void)k.modes();
    const double limit = r * (1.0 + kCoverSlack);
    const auto idx = greedy_cover_indices(k.size(), r, [&](std::size_t i, std::size_t c, double) {
        return distance_x(k.elements[i], k.elements[c]) <= limit;
    });
    CoverResult out;
    out.radius = r;
    out.centers.reserve(idx.size());
    for (std::size_t i : idx) out.centers.push_back(k.elements[i]);
    out.count = out.centers.size();
    return out;
}

std::size_t greedy_cover_count(const PointCloud& k, double r) { return greedy_cover(k, r).count; }

namespace {

struct LatticeAxis {
    double lambda;
    std::vector<double> min_sq;  // squared distance from 0 to each cell
};

void count_cells(const std::vector<LatticeAxis>& axes, std::size_t axis, double acc,
                 std::uint64_t& count, std::uint64_t max_count) {
    if (axis == axes.size()) {
        if (++count > max_count) throw InvalidArgument("unit_ball_Y_cover_count: lattice count exceeds limit");
        return;
    }
    const auto& ax = axes[axis];
    for (double d2 : ax.min_sq) {
        const double next = acc + ax.lambda * d2;
        if (next <= 1.0) count_cells(axes, axis + 1, next, count, max_count);
    }
}

}  // namespace

std::uint64_t unit_ball_Y_cover_count(const SpatialDiscretization& disc, double rho, std::uint64_t max_count) {
    if (!(rho > 0.0)) throw InvalidArgument("unit_ball_Y_cover_count: radius must be positive");
    if (rho >= 1.0 / std::sqrt(disc.eigenvalue(0))) return 1;

    const std::size_t m = disc.modes();
    const double side = 2.0 * rho / std::sqrt(static_cast<double>(m));
    std::vector<LatticeAxis> axes(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double semi_axis = 1.0 / std::sqrt(disc.eigenvalue(i));
        const double cells_real = 2.0 * semi_axis / side;
        const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(cells_real - 1e-9)));
        axes[i].lambda = disc.eigenvalue(i);
        axes[i].min_sq.reserve(cells);
        for (std::size_t j = 0; j < cells; ++j) {
            const double center = (static_cast<double>(j) - 0.5 * static_cast<double>(cells - 1)) * side;
            const double gap = std::max(0.0, std::abs(center) - 0.5 * side);
            axes[i].min_sq.push_back(gap * gap);
        }
    }
    std::uint64_t count = 0;
    count_cells(axes, 0, 0.0, count, max_count);
    return count;
}

}  // namespace ndattr
