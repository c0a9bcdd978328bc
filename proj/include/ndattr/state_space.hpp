#pragma once

// Finite-dimensional phase spaces: the sine-Galerkin truncation of
// X = L^2(0, L) with Dirichlet conditions, the H^1_0-weighted norm that
// plays the role of the compactly embedded space Y, Hausdorff
// semi-distances and covering machinery.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ndattr {

/// Dirichlet Laplacian on (0, L) truncated to the first m sine modes.
class SpatialDiscretization {
public:
    /// delta is the fractional-power exponent used for A^delta weights and
    /// must lie in (0, 1/2).
    explicit SpatialDiscretization(std::size_t modes, double length = 1.0, double delta = 0.25);

    [[nodiscard]] std::size_t modes() const noexcept { return eigenvalues_.size(); }
    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }

    /// lambda_k = (k pi / L)^2 for mode index i = k - 1.
    [[nodiscard]] double eigenvalue(std::size_t i) const { return eigenvalues_.at(i); }
    [[nodiscard]] std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] double fractional_weight(std::size_t i) const { return fractional_weights_.at(i); }

private:
    double length_;
    double delta_;
    std::vector<double> eigenvalues_;
    std::vector<double> fractional_weights_;
};

/// Coefficients of u in the L^2-orthonormal sine basis.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::size_t modes) : c_(modes, 0.0) {}
    explicit StateVector(std::vector<double> coefficients) : c_(std::move(coefficients)) {}
    StateVector(std::initializer_list<double> coefficients) : c_(coefficients) {}

    /// The k-th basis vector e_k (1-based mode number).
    static StateVector basis(std::size_t modes, std::size_t k);

    [[nodiscard]] std::size_t modes() const noexcept { return c_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return c_; }
    [[nodiscard]] std::span<double> coefficients() noexcept { return c_; }

    StateVector& operator+=(const StateVector& o);
    StateVector& operator-=(const StateVector& o);
    StateVector& operator*=(double s);

    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(double s, StateVector a) { return a *= s; }
    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<double> c_;
};

[[nodiscard]] double norm_x(const StateVector& u) noexcept;
[[nodiscard]] double norm_y(const StateVector& u, const SpatialDiscretization& disc);
[[nodiscard]] double distance_x(const StateVector& a, const StateVector& b);

struct PointCloud {
    std::vector<StateVector> elements;
    std::string label;

    [[nodiscard]] bool empty() const noexcept { return elements.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return elements.size(); }
    /// Mode count shared by every element; throws on an empty or mixed cloud.
    [[nodiscard]] std::size_t modes() const;
    [[nodiscard]] double max_norm() const noexcept;
};

/// sup over a in A of the distance from a to B (asymmetric).
[[nodiscard]] double hausdorff_semidist(const PointCloud& a, const PointCloud& b);
/// max of both semi-distances.
[[nodiscard]] double hausdorff_dist(const PointCloud& a, const PointCloud& b);

struct CoverResult {
    std::vector<StateVector> centers;
    double radius = 0.0;
    std::size_t count = 0;
};

/// Relative slack applied to the closed-ball membership test so that points
/// lying on the boundary up to round-off count as covered.
inline constexpr double kCoverSlack = 1e-12;

/// Greedy first-uncovered cover over an abstract index set. within(i, c, r)
/// must answer whether item i lies in the closed ball of radius r around
/// item c. Returns the center indices in the order they were opened.
std::vector<std::size_t> greedy_cover_indices(
    std::size_t n, double radius,
    const std::function<bool(std::size_t, std::size_t, double)>& within);

/// Greedy feasible cover of K by closed X-balls of radius r. Deterministic:
/// the first point (in input order) not yet covered opens the next ball.
[[nodiscard]] CoverResult greedy_cover(const PointCloud& k, double r);
[[nodiscard]] std::size_t greedy_cover_count(const PointCloud& k, double r);

/// Number of X-balls of radius rho that cover the Y unit ellipsoid
/// { sum lambda_k u_k^2 <= 1 }, by an axis-aligned lattice of cubes with
/// side 2 rho / sqrt(m) kept where a cube meets the ellipsoid. Returns 1
/// when rho >= 1/sqrt(lambda_1). Throws if the count exceeds max_count.
[[nodiscard]] std::uint64_t unit_ball_Y_cover_count(const SpatialDiscretization& disc, double rho,
                                                    std::uint64_t max_count = (1ULL << 40));

}  // namespace ndattr
