#include "ndattr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ndattr/errors.hpp"
#include "ndattr/parallel.hpp"

namespace ndattr {

// ---------------------------------------------------------------------------
// Nonlinearity

Nonlinearity Nonlinearity::linear(double c) {
    if (!std::isfinite(c)) throw InvalidArgument("linear nonlinearity: coefficient must be finite");
    Nonlinearity f;
    f.kind_ = Kind::Linear;
    f.a_ = c;
    f.lip_ = std::abs(c);
    f.c0_ = c;
    f.c1_ = 0.0;
    f.rho_ = 1.0;
    return f;
}

Nonlinearity Nonlinearity::saturated_cubic(double a, double b, double saturation) {
    if (!(b >= 0.0) || !(saturation > 0.0) || !std::isfinite(a)) {
        throw InvalidArgument("saturated cubic: need b >= 0 and saturation > 0");
    }
    Nonlinearity f;
    f.kind_ = Kind::SaturatedCubic;
    f.a_ = a;
    f.b_ = b;
    f.sat_ = saturation;
    const double outer_slope = a - 3.0 * b * saturation * saturation;
    f.lip_ = std::max(std::abs(a), std::abs(outer_slope));
    // sign(u) f(u) + C0 |u| increases up to |u| = M and is flat beyond.
    f.c0_ = -outer_slope;
    f.c1_ = 2.0 * b * saturation * saturation * saturation;
    f.rho_ = 3.0;
    return f;
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size()) {
        throw InvalidArgument("tabulated nonlinearity: need >= 2 nodes and one value per node");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1])) throw InvalidArgument("tabulated nonlinearity: nodes must increase");
    }
    Nonlinearity f;
    f.kind_ = Kind::Tabulated;
    f.nodes_ = std::move(nodes);
    f.values_ = std::move(values);
    f.rho_ = 1.0;
    f.derive_sign_constants();
    return f;
}

void Nonlinearity::derive_sign_constants() {
    const auto& x = nodes_;
    const auto& y = values_;
    const std::size_t n = x.size();
    lip_ = 0.0;
    for (std::size_t i = 1; i < n; ++i) lip_ = std::max(lip_, std::abs((y[i] - y[i - 1]) / (x[i] - x[i - 1])));
    const double left = (y[1] - y[0]) / (x[1] - x[0]);
    const double right = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    c0_ = std::min(-left, -right);
    // sign(u) f(u) + C0 |u| is piecewise linear on each half-line, so its
    // supremum sits at a node or at u -> 0+-.
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        const double sgn = x[i] > 0.0 ? 1.0 : -1.0;
        best = std::max(best, sgn * y[i] + c0_ * std::abs(x[i]));
    }
    const double f0 = (*this)(0.0);
    best = std::max({best, f0, -f0});
    c1_ = best;
}

double Nonlinearity::operator()(double u) const {
    switch (kind_) {
        case Kind::Linear:
            return -a_ * u;
        case Kind::SaturatedCubic: {
            if (std::abs(u) <= sat_) return a_ * u - b_ * u * u * u;
            const double m = u > 0.0 ? sat_ : -sat_;
            const double fm = a_ * m - b_ * m * m * m;
            const double slope = a_ - 3.0 * b_ * sat_ * sat_;
            return fm + slope * (u - m);
        }
        case Kind::Tabulated: {
            const auto& x = nodes_;
            const auto& y = values_;
            std::size_t i;
            if (u <= x.front()) {
                i = 0;
            } else if (u >= x.back()) {
                i = x.size() - 2;
            } else {
                i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), u) - x.begin()) - 1;
            }
            const double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
            return y[i] + slope * (u - x[i]);
        }
    }
    return 0.0;
}

std::string Nonlinearity::name() const {
    switch (kind_) {
        case Kind::Linear: return "linear";
        case Kind::SaturatedCubic: return "saturated_cubic";
        case Kind::Tabulated: return "tabulated";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Process

Process::Process(ProcessConfig cfg) : cfg_(std::move(cfg)) {
    const double h = cfg_.h;
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("time step must be positive");
    if (!(h * cfg_.nonlinearity.lipschitz() < 1.0)) {
        throw InstabilityError("time step violates the stability bound h * Lip_f < 1");
    }
    const std::size_t m = cfg_.disc.modes();
    decay_.resize(m);
    for (std::size_t k = 0; k < m; ++k) decay_[k] = std::exp(-cfg_.disc.eigenvalue(k) * h);

    nodes_ = cfg_.quadrature_nodes == 0 ? 4 * m : cfg_.quadrature_nodes;
    if (nodes_ < m) throw InvalidArgument("quadrature nodes must be at least the mode count");
    const double length = cfg_.disc.length();
    node_weight_ = length / static_cast<double>(nodes_ + 1);
    const double amp = std::sqrt(2.0 / length);
    basis_at_nodes_.resize(nodes_ * m);
    for (std::size_t j = 0; j < nodes_; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            const double arg = std::numbers::pi * static_cast<double>((k + 1) * (j + 1)) / static_cast<double>(nodes_ + 1);
            basis_at_nodes_[j * m + k] = amp * std::sin(arg);
        }
    }
}

StateVector Process::project_nonlinearity(const StateVector& u) const {
    const std::size_t m = modes();
    if (u.modes() != m) throw InvalidArgument("mode-count mismatch");
    const auto& f = cfg_.nonlinearity;
    StateVector out(m);
    if (f.is_linear()) {
        for (std::size_t k = 0; k < m; ++k) out[k] = f(u[k]);
        return out;
    }
    for (std::size_t j = 0; j < nodes_; ++j) {
        const double* row = basis_at_nodes_.data() + j * m;
        double value = 0.0;
        for (std::size_t k = 0; k < m; ++k) value += u[k] * row[k];
        const double fv = f(value) * node_weight_;
        for (std::size_t k = 0; k < m; ++k) out[k] += fv * row[k];
    }
    return out;
}

void Process::advance(std::span<double> u, const SymbolPath& sigma, double t, double dt,
                      std::span<double> scratch) const {
    const std::size_t m = u.size();
    sigma.evaluate_into(t, scratch);
    const auto& f = cfg_.nonlinearity;
    if (f.is_linear()) {
        if (!f.is_zero()) {
            for (std::size_t k = 0; k < m; ++k) scratch[k] += f(u[k]);
        }
    } else {
        for (std::size_t j = 0; j < nodes_; ++j) {
            const double* row = basis_at_nodes_.data() + j * m;
            double value = 0.0;
            for (std::size_t k = 0; k < m; ++k) value += u[k] * row[k];
            const double fv = f(value) * node_weight_;
            for (std::size_t k = 0; k < m; ++k) scratch[k] += fv * row[k];
        }
    }
    if (dt == cfg_.h) {
        for (std::size_t k = 0; k < m; ++k) u[k] = decay_[k] * (u[k] + dt * scratch[k]);
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            u[k] = std::exp(-cfg_.disc.eigenvalue(k) * dt) * (u[k] + dt * scratch[k]);
        }
    }
}

std::size_t Process::full_steps(double span) const {
    return static_cast<std::size_t>(std::floor(span / cfg_.h + 1e-9));
}

namespace {
void require_finite(const StateVector& u, double t) {
    for (double v : u.coefficients()) {
        if (!std::isfinite(v)) throw InstabilityError("non-finite state at t = " + std::to_string(t));
    }
}
void require_symbol(const SymbolPath& sigma, std::size_t modes) {
    if (sigma.modes() != modes) throw InvalidArgument("symbol mode count does not match the discretization");
}
}  // namespace

StateVector Process::step(const StateVector& u, const SymbolPath& sigma, double t) const {
    return step(u, sigma, t, cfg_.h);
}

StateVector Process::step(const StateVector& u, const SymbolPath& sigma, double t, double dt) const {
    if (u.modes() != modes()) throw InvalidArgument("mode-count mismatch");
    require_symbol(sigma, modes());
    StateVector out = u;
    std::vector<double> scratch(modes());
    advance(out.coefficients(), sigma, t, dt, scratch);
    require_finite(out, t + dt);
    return out;
}

StateVector Process::evolve(const StateVector& u, const SymbolPath& sigma, double s, double t) const {
    if (t < s) throw InvalidArgument("evolve: final time precedes initial time");
    if (u.modes() != modes()) throw InvalidArgument("mode-count mismatch");
    require_symbol(sigma, modes());
    StateVector out = u;
    if (t == s) return out;
    std::vector<double> scratch(modes());
    const double span = t - s;
    const std::size_t n = full_steps(span);
    const double h = cfg_.h;
    for (std::size_t i = 0; i < n; ++i) {
        advance(out.coefficients(), sigma, s + static_cast<double>(i) * h, h, scratch);
        if ((i & 1023U) == 1023U) require_finite(out, s + static_cast<double>(i + 1) * h);
    }
    const double done = static_cast<double>(n) * h;
    const double rest = span - done;
    if (rest > 1e-9 * h) advance(out.coefficients(), sigma, s + done, rest, scratch);
    require_finite(out, t);
    return out;
}

std::pair<StateVector, SymbolPath> Process::skew_evolve(const StateVector& x, const SymbolPath& sigma, double t) const {
    if (t < 0.0) throw InvalidArgument("skew_evolve: negative time");
    return {evolve(x, sigma, 0.0, t), sigma.shifted(t)};
}

std::vector<Process::Sample> Process::trajectory(const StateVector& u, const SymbolPath& sigma, double s, double t,
                                                 std::size_t stride) const {
    if (t < s) throw InvalidArgument("trajectory: final time precedes initial time");
    if (stride == 0) throw InvalidArgument("trajectory: stride must be positive");
    if (u.modes() != modes()) throw InvalidArgument("mode-count mismatch");
    require_symbol(sigma, modes());
    std::vector<Sample> out;
    out.push_back({s, u});
    StateVector cur = u;
    std::vector<double> scratch(modes());
    const double h = cfg_.h;
    const std::size_t n = full_steps(t - s);
    for (std::size_t i = 0; i < n; ++i) {
        advance(cur.coefficients(), sigma, s + static_cast<double>(i) * h, h, scratch);
        if ((i + 1) % stride == 0) {
            require_finite(cur, s + static_cast<double>(i + 1) * h);
            out.push_back({s + static_cast<double>(i + 1) * h, cur});
        }
    }
    const double done = static_cast<double>(n) * h;
    const double rest = (t - s) - done;
    if (rest > 1e-9 * h) advance(cur.coefficients(), sigma, s + done, rest, scratch);
    require_finite(cur, t);
    if (out.back().t != t && (rest > 1e-9 * h || n % stride != 0)) out.push_back({t, cur});
    return out;
}

void Process::evolve_observed(StateVector& u, const SymbolPath& sigma, double s, double t,
                              const std::function<void(double, const StateVector&)>& observe) const {
    if (t < s) throw InvalidArgument("evolve: final time precedes initial time");
    if (u.modes() != modes()) throw InvalidArgument("mode-count mismatch");
    require_symbol(sigma, modes());
    std::vector<double> scratch(modes());
    const double h = cfg_.h;
    const std::size_t n = full_steps(t - s);
    for (std::size_t i = 0; i < n; ++i) {
        advance(u.coefficients(), sigma, s + static_cast<double>(i) * h, h, scratch);
        const double now = s + static_cast<double>(i + 1) * h;
        if ((i & 1023U) == 1023U) require_finite(u, now);
        observe(now, u);
    }
    const double done = static_cast<double>(n) * h;
    const double rest = (t - s) - done;
    if (rest > 1e-9 * h) {
        advance(u.coefficients(), sigma, s + done, rest, scratch);
        observe(t, u);
    }
    require_finite(u, t);
}

StateVector step(const StateVector& u, const SymbolPath& sigma, double t, const ProcessConfig& cfg) {
    return Process(cfg).step(u, sigma, t);
}

StateVector evolve(const StateVector& u, const SymbolPath& sigma, double s, double t, const ProcessConfig& cfg) {
    return Process(cfg).evolve(u, sigma, s, t);
}

double verify_translation_property(const Process& process, const StateVector& u, const SymbolPath& g,
                                   double shift_amount, double s, double t) {
    const double h = process.h();
    const double steps = shift_amount / h;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, std::abs(steps))) {
        throw InvalidArgument("verify_translation_property: shift is not aligned with the time step");
    }
    const StateVector lhs = process.evolve(u, g.shifted(shift_amount), s, t);
    const StateVector rhs = process.evolve(u, g, s + shift_amount, t + shift_amount);
    return distance_x(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Hypothesis estimators

SmoothingEstimate estimate_smoothing_kappa(const Process& process, const PointCloud& b,
                                           std::span<const SymbolPath> symbols, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("estimate_smoothing_kappa: tau must be positive");
    if (b.size() < 2) throw InvalidArgument("estimate_smoothing_kappa: need at least two points");
    if (symbols.empty()) throw InvalidArgument("estimate_smoothing_kappa: need at least one symbol");
    const auto& disc = process.config().disc;
    std::vector<SmoothingEstimate> per_symbol(symbols.size());
    parallel_for(symbols.size(), [&](std::size_t si) {
        std::vector<StateVector> images;
        images.reserve(b.size());
        for (const auto& x : b.elements) images.push_back(process.evolve(x, symbols[si], 0.0, tau));
        SmoothingEstimate est;
        for (std::size_t i = 0; i < b.size(); ++i) {
            for (std::size_t j = i + 1; j < b.size(); ++j) {
                const double dx = distance_x(b.elements[i], b.elements[j]);
                if (dx == 0.0) continue;
                const double dy = norm_y(images[i] - images[j], disc);
                est.kappa = std::max(est.kappa, dy / dx);
                ++est.pairs;
            }
        }
        per_symbol[si] = est;
    });
    SmoothingEstimate out;
    for (const auto& e : per_symbol) {
        out.kappa = std::max(out.kappa, e.kappa);
        out.pairs += e.pairs;
    }
    if (out.pairs == 0) throw InvalidArgument("estimate_smoothing_kappa: all pairs coincide");
    return out;
}

namespace {

double snap_exponent(double slope) {
    constexpr double allowance = 0.05;
    for (int k = 1; k <= 20; ++k) {
        const double candidate = 1.0 / k;
        if (candidate <= slope + allowance) return candidate;
    }
    return std::max(slope, 1e-3);
}

}  // namespace

HoelderEstimate estimate_time_hoelder(const Process& process, const PointCloud& b,
                                      std::span<const SymbolPath> symbols, double r) {
    if (!(r > 0.0)) throw InvalidArgument("estimate_time_hoelder: r must be positive");
    if (b.empty() || symbols.empty()) throw InvalidArgument("estimate_time_hoelder: empty sample");
    const double h = process.h();
    const auto steps = static_cast<std::size_t>(std::floor(r / h + 1e-9));
    if (steps < 8) throw InvalidArgument("estimate_time_hoelder: r must span at least 8 time steps");
    const std::vector<double> starts = {0.0, 0.5 * r, r};
    constexpr std::size_t coarse = 8;
    auto coarse_index = [&](std::size_t i) { return (i * steps) / coarse; };

    struct Series {
        std::vector<StateVector> states;  // every step from s to s + steps h
    };
    // trajectories[(sigma, s)][x]
    const std::size_t groups = symbols.size() * starts.size();
    std::vector<std::vector<Series>> traj(groups, std::vector<Series>(b.size()));
    parallel_for(groups * b.size(), [&](std::size_t job) {
        const std::size_t g = job / b.size();
        const std::size_t xi = job % b.size();
        const auto& sigma = symbols[g / starts.size()];
        const double s = starts[g % starts.size()];
        auto samples = process.trajectory(b.elements[xi], sigma, s, s + static_cast<double>(steps) * h, 1);
        auto& states = traj[g][xi].states;
        states.reserve(samples.size());
        for (auto& smp : samples) states.push_back(std::move(smp.u));
    });

    HoelderEstimate out;
    // Time response slope at x = y: dyadic lags from each coarse base time.
    double min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t xi = 0; xi < b.size(); ++xi) {
            const auto& st = traj[g][xi].states;
            for (std::size_t c = 0; c < coarse; ++c) {
                const std::size_t base = coarse_index(c);
                std::vector<double> lx, ly;
                for (std::size_t lag = 1; base + lag <= steps; lag *= 2) {
                    const double resp = distance_x(st[base + lag], st[base]);
                    if (resp > 0.0) {
                        lx.push_back(std::log(static_cast<double>(lag) * h));
                        ly.push_back(std::log(resp));
                    }
                }
                if (lx.size() < 3) continue;
                double mx = 0.0, my = 0.0;
                for (std::size_t i = 0; i < lx.size(); ++i) {
                    mx += lx[i];
                    my += ly[i];
                }
                mx /= static_cast<double>(lx.size());
                my /= static_cast<double>(ly.size());
                double sxy = 0.0, sxx = 0.0;
                for (std::size_t i = 0; i < lx.size(); ++i) {
                    sxy += (lx[i] - mx) * (ly[i] - my);
                    sxx += (lx[i] - mx) * (lx[i] - mx);
                }
                if (sxx > 0.0) min_slope = std::min(min_slope, sxy / sxx);
            }
        }
    }
    out.fitted_slope = std::isfinite(min_slope) ? min_slope : 1.0;
    out.theta = snap_exponent(out.fitted_slope);
    out.gamma = 1.0;

    // Envelopes over the coarse grid and the dyadic lags.
    std::size_t tuples = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t xi = 0; xi < b.size(); ++xi) {
            const auto& st = traj[g][xi].states;
            for (std::size_t i = 0; i <= coarse; ++i) {
                for (std::size_t j = 0; j <= coarse; ++j) {
                    if (i == j) continue;
                    const std::size_t a = coarse_index(i), c = coarse_index(j);
                    const double dt = std::abs(static_cast<double>(a) - static_cast<double>(c)) * h;
                    out.time_constant = std::max(out.time_constant, distance_x(st[a], st[c]) / std::pow(dt, out.theta));
                    ++tuples;
                }
            }
            for (std::size_t lag = 1; lag <= steps; lag *= 2) {
                const double dt = static_cast<double>(lag) * h;
                out.time_constant = std::max(out.time_constant, distance_x(st[lag], st[0]) / std::pow(dt, out.theta));
                ++tuples;
            }
            for (std::size_t yi = xi + 1; yi < b.size(); ++yi) {
                const double dx = distance_x(b.elements[xi], b.elements[yi]);
                if (dx == 0.0) continue;
                const auto& sy = traj[g][yi].states;
                for (std::size_t i = 0; i <= coarse; ++i) {
                    const std::size_t a = coarse_index(i);
                    out.state_constant = std::max(out.state_constant, distance_x(st[a], sy[a]) / dx);
                    ++tuples;
                }
            }
        }
    }
    double joint = 0.0;
    double residual = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t xi = 0; xi < b.size(); ++xi) {
            for (std::size_t yi = 0; yi < b.size(); ++yi) {
                if (xi == yi) continue;
                const double dx = distance_x(b.elements[xi], b.elements[yi]);
                if (dx == 0.0) continue;
                const auto& st = traj[g][xi].states;
                const auto& sy = traj[g][yi].states;
                for (std::size_t i = 0; i <= coarse; ++i) {
                    for (std::size_t j = 0; j <= coarse; ++j) {
                        if (i == j) continue;
                        const std::size_t a = coarse_index(i), c = coarse_index(j);
                        const double dt = std::abs(static_cast<double>(a) - static_cast<double>(c)) * h;
                        const double lhs = distance_x(st[a], sy[c]);
                        const double tpow = std::pow(dt, out.theta);
                        joint = std::max(joint, lhs / (dx + tpow));
                        residual = std::max(residual, lhs - (out.state_constant * dx + out.time_constant * tpow));
                        ++tuples;
                    }
                }
            }
        }
    }
    if (tuples < 10) throw InvalidArgument("estimate_time_hoelder: fewer than 10 tuples");
    out.tuples = tuples;
    out.joint_residual = std::isfinite(residual) ? residual : 0.0;
    out.C_r = std::max({out.state_constant, out.time_constant, joint});
    return out;
}

SymbolLipschitzEstimate estimate_symbol_lipschitz(const Process& process, const PointCloud& b,
                                                  std::span<const SymbolPath> symbols, std::span<const double> t_grid,
                                                  const FrechetConfig& metric) {
    if (symbols.size() < 2) throw InvalidArgument("estimate_symbol_lipschitz: need at least two symbols");
    if (b.empty()) throw InvalidArgument("estimate_symbol_lipschitz: empty absorbing sample");
    std::vector<double> times;
    for (double t : t_grid) {
        if (t >= 1.0) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    if (times.empty()) throw InvalidArgument("estimate_symbol_lipschitz: time grid has no t >= 1");

    struct Pair {
        std::size_t i, j;
        double d;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        for (std::size_t j = i + 1; j < symbols.size(); ++j) {
            const double d = frechet_dist(symbols[i], symbols[j], metric);
            if (d > 0.0) pairs.push_back({i, j, d});
        }
    }
    if (pairs.empty()) throw InvalidArgument("estimate_symbol_lipschitz: identical symbols only");

    // images[sigma][x][t]
    std::vector<std::vector<std::vector<StateVector>>> images(
        symbols.size(), std::vector<std::vector<StateVector>>(b.size()));
    parallel_for(symbols.size() * b.size(), [&](std::size_t job) {
        const std::size_t si = job / b.size();
        const std::size_t xi = job % b.size();
        auto& out = images[si][xi];
        StateVector cur = b.elements[xi];
        double now = 0.0;
        for (double t : times) {
            cur = process.evolve(cur, symbols[si], now, t);
            now = t;
            out.push_back(cur);
        }
    });

    SymbolLipschitzEstimate est;
    est.times = times;
    est.pairs = pairs.size();
    est.measured.assign(times.size(), 0.0);
    for (const auto& p : pairs) {
        for (std::size_t xi = 0; xi < b.size(); ++xi) {
            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                const double diff = distance_x(images[p.i][xi][ti], images[p.j][xi][ti]);
                est.measured[ti] = std::max(est.measured[ti], diff / p.d);
            }
        }
    }
    est.lipschitz.resize(times.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) est.lipschitz[ti] = std::max(1.0, est.measured[ti]);

    double beta = 0.0;
    if (times.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            mx += times[i];
            my += std::log(est.lipschitz[i]);
        }
        mx /= static_cast<double>(times.size());
        my /= static_cast<double>(times.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            sxy += (times[i] - mx) * (std::log(est.lipschitz[i]) - my);
            sxx += (times[i] - mx) * (times[i] - mx);
        }
        if (sxx > 0.0) beta = std::max(0.0, sxy / sxx);
    }
    est.beta = beta;
    double c1 = 1.0;
    for (std::size_t i = 0; i < times.size(); ++i) c1 = std::max(c1, est.lipschitz[i] * std::exp(-beta * times[i]));
    est.c1 = c1;
    return est;
}

}  // namespace ndattr
