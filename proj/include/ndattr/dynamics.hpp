#pragma once

// Galerkin-truncated reaction-diffusion processes
//   v_t = v_xx + f(v) + sigma(t) on (0, L), Dirichlet boundary,
// the skew-product step, and empirical estimators for the smoothing,
// Hoelder-in-time and symbol-Lipschitz constants.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ndattr/state_space.hpp"
#include "ndattr/symbol_space.hpp"

namespace ndattr {

/// Pointwise, globally Lipschitz reaction term.
class Nonlinearity {
public:
    enum class Kind { Linear, SaturatedCubic, Tabulated };

    /// f(u) = -c u. c = 0 is the pure heat equation.
    static Nonlinearity linear(double c);
    /// f(u) = a u - b u^3 for |u| <= M, continued linearly with the slope at
    /// +-M beyond, which keeps f globally Lipschitz.
    static Nonlinearity saturated_cubic(double a, double b, double saturation);
    /// Piecewise-linear interpolation of (u_i, f_i), linear extrapolation of
    /// the end slopes.
    static Nonlinearity tabulated(std::vector<double> nodes, std::vector<double> values);

    [[nodiscard]] double operator()(double u) const;
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;
    [[nodiscard]] bool is_zero() const noexcept { return kind_ == Kind::Linear && a_ == 0.0; }
    [[nodiscard]] bool is_linear() const noexcept { return kind_ == Kind::Linear; }

    [[nodiscard]] double lipschitz() const noexcept { return lip_; }
    /// Sign-condition constants: u f(u) <= -C0 u^2 + C1 |u|.
    [[nodiscard]] double c0() const noexcept { return c0_; }
    [[nodiscard]] double c1() const noexcept { return c1_; }
    /// Growth exponent, recorded only.
    [[nodiscard]] double growth_exponent() const noexcept { return rho_; }

private:
    Nonlinearity() = default;
    void derive_sign_constants();

    Kind kind_ = Kind::Linear;
    double a_ = 0.0, b_ = 0.0, sat_ = 0.0;
    std::vector<double> nodes_, values_;
    double lip_ = 0.0, c0_ = 0.0, c1_ = 0.0, rho_ = 1.0;
};

struct ProcessConfig {
    SpatialDiscretization disc{1};
    Nonlinearity nonlinearity = Nonlinearity::linear(0.0);
    double h = 1e-3;
    /// Collocation points for f; 0 means 4 m.
    std::size_t quadrature_nodes = 0;
};

/// The system of processes U_sigma(t, s). One step is the exponential
/// semi-implicit Euler update
///   u_k <- exp(-lambda_k h) (u_k + h [P f(u) + sigma(t)]_k),
/// exact for the linear part; f is applied at the interior points of a
/// uniform grid and projected back by the discrete sine transform.
class Process {
public:
    explicit Process(ProcessConfig cfg);

    [[nodiscard]] const ProcessConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t modes() const noexcept { return cfg_.disc.modes(); }
    [[nodiscard]] double h() const noexcept { return cfg_.h; }

    [[nodiscard]] StateVector step(const StateVector& u, const SymbolPath& sigma, double t) const;
    /// Step of an explicit length dt (final partial steps).
    [[nodiscard]] StateVector step(const StateVector& u, const SymbolPath& sigma, double t, double dt) const;

    /// U_sigma(t, s) u: full steps from s at times s + n h, then one partial
    /// step if t - s is not a multiple of h. U(s, s) is the identity.
    [[nodiscard]] StateVector evolve(const StateVector& u, const SymbolPath& sigma, double s, double t) const;

    /// (evolve(x, sigma, 0, t), theta_t sigma).
    [[nodiscard]] std::pair<StateVector, SymbolPath> skew_evolve(const StateVector& x, const SymbolPath& sigma,
                                                                 double t) const;

    /// P f(u): the Galerkin projection of the pointwise nonlinearity.
    [[nodiscard]] StateVector project_nonlinearity(const StateVector& u) const;

    struct Sample {
        double t;
        StateVector u;
    };
    /// States at s and every stride-th step up to t (t itself always included).
    [[nodiscard]] std::vector<Sample> trajectory(const StateVector& u, const SymbolPath& sigma, double s, double t,
                                                 std::size_t stride = 1) const;

    /// Advances u in place from s to t, calling observe(t_i, u_i) after
    /// every step.
    void evolve_observed(StateVector& u, const SymbolPath& sigma, double s, double t,
                         const std::function<void(double, const StateVector&)>& observe) const;

private:
    void advance(std::span<double> u, const SymbolPath& sigma, double t, double dt, std::span<double> scratch) const;
    [[nodiscard]] std::size_t full_steps(double span) const;

    ProcessConfig cfg_;
    std::vector<double> decay_;           // exp(-lambda_k h)
    std::vector<double> basis_at_nodes_;  // nodes x modes, phi_k(x_j)
    std::size_t nodes_ = 0;
    double node_weight_ = 0.0;
};

[[nodiscard]] StateVector step(const StateVector& u, const SymbolPath& sigma, double t, const ProcessConfig& cfg);
[[nodiscard]] StateVector evolve(const StateVector& u, const SymbolPath& sigma, double s, double t,
                                 const ProcessConfig& cfg);

/// |U_{theta_a g}(t, s) u - U_g(t + a, s + a) u|_X. The shift must be a
/// multiple of the time step.
[[nodiscard]] double verify_translation_property(const Process& process, const StateVector& u, const SymbolPath& g,
                                                 double shift_amount, double s, double t);

struct HypothesisEstimates {
    double kappa_tau = 0.0;
    double theta_hoelder = 1.0;
    double gamma_hoelder = 1.0;
    double C_r = 0.0;
    double c1 = 1.0;
    double beta = 0.0;
    double P = 2.0;
    double zeta = 0.0;
    double tau_absorb = 0.0;
    double R_absorb = 0.0;
    double eta1 = 1.0, eta2 = 1.0, Q1 = 1.0, Q2 = 1.0;
};

struct SmoothingEstimate {
    double kappa = 0.0;
    std::size_t pairs = 0;
};

/// max over distinct pairs x, y in B and symbols of
/// |U(tau,0)x - U(tau,0)y|_Y / |x - y|_X.
[[nodiscard]] SmoothingEstimate estimate_smoothing_kappa(const Process& process, const PointCloud& b,
                                                         std::span<const SymbolPath> symbols, double tau);

struct HoelderEstimate {
    double theta = 1.0;
    double gamma = 1.0;
    double C_r = 0.0;
    double fitted_slope = 1.0;    // raw log-log slope before snapping
    double state_constant = 0.0;  // max |U x - U y| / |x - y| at t = t~
    double time_constant = 0.0;   // max |U(t) x - U(t~) x| / |t - t~|^theta
    /// max over mixed tuples of lhs - (state |x-y| + time |t-t~|^theta);
    /// <= 0 when the separable envelopes already cover the joint bound.
    double joint_residual = 0.0;
    std::size_t tuples = 0;
};

/// Fits |U(t+s,s)x - U(t~+s,s)y| <= C(r) (|x-y|^gamma + |t-t~|^theta) on
/// t, t~ in [0, r]. gamma is fixed to 1. theta is the log-log slope of the
/// x = y time response, snapped down to the ladder 1, 1/2, 1/3, ... with a
/// 0.05 allowance.
[[nodiscard]] HoelderEstimate estimate_time_hoelder(const Process& process, const PointCloud& b,
                                                    std::span<const SymbolPath> symbols, double r);

struct SymbolLipschitzEstimate {
    double c1 = 1.0;
    double beta = 0.0;
    std::vector<double> times;
    std::vector<double> measured;   // raw max ratio per time
    std::vector<double> lipschitz;  // L(t) = max(1, measured)
    std::size_t pairs = 0;
};

/// Envelope c1 e^{beta t} >= |U_s1(t,0)x - U_s2(t,0)x| / d(s1, s2) over
/// t >= 1 in t_grid, x in B and distinct symbol pairs.
[[nodiscard]] SymbolLipschitzEstimate estimate_symbol_lipschitz(const Process& process, const PointCloud& b,
                                                                std::span<const SymbolPath> symbols,
                                                                std::span<const double> t_grid,
                                                                const FrechetConfig& metric = {});

}  // namespace ndattr
