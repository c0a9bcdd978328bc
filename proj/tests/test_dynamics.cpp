#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ndattr/dynamics.hpp"
#include "ndattr/errors.hpp"

using namespace ndattr;
using std::numbers::pi;

namespace {

Process make_process(std::size_t m, Nonlinearity f, double h = 1e-3) {
    ProcessConfig cfg;
    cfg.disc = SpatialDiscretization(m);
    cfg.nonlinearity = std::move(f);
    cfg.h = h;
    return Process(cfg);
}

StateVector random_state(std::mt19937_64& rng, std::size_t m, double scale = 1.0) {
    std::uniform_real_distribution<double> ud(-scale, scale);
    StateVector u(m);
    for (std::size_t k = 0; k < m; ++k) u[k] = ud(rng);
    return u;
}

SymbolPath bump_forcing(std::size_t m, int depth) {
    return make_cantor_forcing(y_ball_indicator_sampler(SpatialDiscretization(m), depth), depth);
}

}  // namespace

TEST_CASE("nonlinearity families satisfy their declared constants") {
    const std::vector<Nonlinearity> fs = {
        Nonlinearity::linear(2.0),
        Nonlinearity::linear(-0.5),
        Nonlinearity::saturated_cubic(1.0, 1.0, 1.5),
        Nonlinearity::saturated_cubic(-2.0, 0.5, 2.0),
        Nonlinearity::tabulated({-2.0, -1.0, 0.0, 1.0, 2.0}, {3.0, 0.5, 0.1, -0.5, -2.5}),
    };
    for (const auto& f : fs) {
        CAPTURE(f.name());
        CHECK(f.c1() >= 0.0);
        for (int i = -4000; i < 4000; ++i) {
            const double a = i * 2.5e-3, b = a + 1.7e-3;
            CHECK(std::abs(f(a) - f(b)) <= f.lipschitz() * std::abs(a - b) * (1.0 + 1e-12) + 1e-15);
            CHECK(a * f(a) <= -f.c0() * a * a + f.c1() * std::abs(a) + 1e-12);
        }
    }
    const auto cubic = Nonlinearity::saturated_cubic(1.0, 1.0, 1.5);
    CHECK(cubic.lipschitz() == doctest::Approx(std::max(1.0, std::abs(1.0 - 3.0 * 2.25))));
    CHECK(cubic.c0() == doctest::Approx(-(1.0 - 3.0 * 2.25)));
    CHECK(cubic.c1() == doctest::Approx(2.0 * 3.375));
}

TEST_CASE("stability bound is enforced") {
    CHECK_THROWS_AS(make_process(2, Nonlinearity::linear(10.0), 0.1), InstabilityError);
    CHECK_NOTHROW(make_process(2, Nonlinearity::linear(9.0), 0.1));
    CHECK_THROWS_AS(make_process(2, Nonlinearity::linear(0.0), 0.0), InvalidArgument);
}

TEST_CASE("single-step oracles") {
    const double h = 1e-3;
    const auto heat = make_process(1, Nonlinearity::linear(0.0), h);
    const auto zero = SymbolPath::zero(1);
    const auto e1 = StateVector::basis(1, 1);
    CHECK(heat.step(e1, zero, 0.0)[0] == doctest::Approx(std::exp(-pi * pi * h)).epsilon(1e-15));

    const double c = 2.5;
    const auto forced = SymbolPath::constant(c * e1);
    CHECK(heat.step(StateVector(1), forced, 0.0)[0] == doctest::Approx(c * h * std::exp(-pi * pi * h)).epsilon(1e-14));

    const auto damped = make_process(1, Nonlinearity::linear(1.0), h);
    CHECK(damped.step(e1, zero, 0.0)[0] == doctest::Approx(std::exp(-pi * pi * h) * (1.0 - h)).epsilon(1e-15));
}

TEST_CASE("collocated nonlinearity projects exactly for polynomials in range") {
    // f(u) = a u on the cubic branch with b = 0 is linear, so the projection
    // must reproduce a u mode by mode.
    const auto p = make_process(5, Nonlinearity::saturated_cubic(0.7, 0.0, 1.0));
    std::mt19937_64 rng(3);
    const auto u = random_state(rng, 5);
    const auto pf = p.project_nonlinearity(u);
    for (std::size_t k = 0; k < 5; ++k) CHECK(pf[k] == doctest::Approx(0.7 * u[k]).epsilon(1e-12));
}

TEST_CASE("evolve identity, decay and cocycle") {
    const auto heat = make_process(4, Nonlinearity::linear(0.0));
    const auto zero = SymbolPath::zero(4);
    std::mt19937_64 rng(5);
    const auto u = random_state(rng, 4);
    CHECK(heat.evolve(u, zero, 0.3, 0.3) == u);

    const auto e1 = StateVector::basis(4, 1);
    const double n = norm_x(heat.evolve(e1, zero, 0.0, 1.0));
    CHECK(n == doctest::Approx(std::exp(-pi * pi)).epsilon(1e-12));

    // Bit-identical when h is a power of two; round-off level otherwise.
    const auto g = bump_forcing(4, 3);
    const auto dyadic = make_process(4, Nonlinearity::saturated_cubic(1.0, 1.0, 2.0), 1.0 / 1024.0);
    CHECK(dyadic.evolve(dyadic.evolve(u, g, 0.0, 1.0), g, 1.0, 2.0) == dyadic.evolve(u, g, 0.0, 2.0));
    const auto p = make_process(4, Nonlinearity::saturated_cubic(1.0, 1.0, 2.0));
    const auto split = p.evolve(p.evolve(u, g, 0.0, 1.0), g, 1.0, 2.0);
    CHECK(distance_x(split, p.evolve(u, g, 0.0, 2.0)) <= 1e-12);
    CHECK_THROWS_AS((void)p.evolve(u, g, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("partial final step") {
    const auto heat = make_process(1, Nonlinearity::linear(0.0));
    const auto e1 = StateVector::basis(1, 1);
    const auto out = heat.evolve(e1, SymbolPath::zero(1), 0.0, 0.0125);
    CHECK(out[0] == doctest::Approx(std::exp(-pi * pi * 0.0125)).epsilon(1e-13));
}

TEST_CASE("skew-product semigroup") {
    const auto p = make_process(3, Nonlinearity::linear(1.0));
    const auto g = bump_forcing(3, 3);
    std::mt19937_64 rng(7);
    const auto x = random_state(rng, 3);
    const auto [x0, s0] = p.skew_evolve(x, g, 0.0);
    CHECK(x0 == x);
    CHECK(frechet_dist(s0, g) == 0.0);

    const auto [x1, s1] = p.skew_evolve(x, g, 1.0);
    const auto [x2, s2] = p.skew_evolve(x1, s1, 1.0);
    const auto [y2, r2] = p.skew_evolve(x, g, 2.0);
    CHECK(distance_x(x2, y2) <= 1e-12);
    CHECK(frechet_dist(s2, r2) == 0.0);

    const auto c = SymbolPath::constant(StateVector{0.1, 0.2, 0.3});
    const auto [xc, sc] = p.skew_evolve(x, c, 0.7);
    CHECK(frechet_dist(sc, c) == 0.0);
    CHECK(xc == p.evolve(x, c, 0.0, 0.7));
    CHECK_THROWS_AS((void)p.skew_evolve(x, c, -1.0), InvalidArgument);
}

TEST_CASE("translation property") {
    const auto p = make_process(4, Nonlinearity::saturated_cubic(1.0, 1.0, 2.0));
    std::mt19937_64 rng(9);
    const auto u = random_state(rng, 4);
    const auto g = bump_forcing(4, 4);
    CHECK(verify_translation_property(p, u, g, 0.0, 0.0, 1.0) == 0.0);
    CHECK(verify_translation_property(p, u, SymbolPath::constant(StateVector{1.0, 0.0, 0.0, 0.0}), 0.37, 0.0, 1.0) <=
          1e-12);
    CHECK(verify_translation_property(p, u, g, 0.5, 0.0, 1.0) <= 1e-12);
    CHECK_THROWS_AS((void)verify_translation_property(p, u, g, 0.5004, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("Lipschitz-in-state Gronwall bound") {
    const auto f = Nonlinearity::saturated_cubic(1.0, 1.0, 1.2);
    const auto p = make_process(5, f);
    const auto g = bump_forcing(5, 4);
    const double lambda1 = pi * pi;
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const auto x = random_state(rng, 5), y = random_state(rng, 5);
        for (double t : {0.1, 0.5, 1.0}) {
            const double lhs = distance_x(p.evolve(x, g, 0.0, t), p.evolve(y, g, 0.0, t));
            CHECK(lhs <= std::exp((f.lipschitz() - lambda1) * t) * distance_x(x, y) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("smoothing constant oracles") {
    const auto heat = make_process(4, Nonlinearity::linear(0.0));
    const SymbolPath zero[] = {SymbolPath::zero(4)};
    PointCloud b;
    b.elements.push_back(StateVector(4));
    for (std::size_t k = 1; k <= 4; ++k) b.elements.push_back(StateVector::basis(4, k));
    const auto est = estimate_smoothing_kappa(heat, b, zero, 0.1);
    CHECK(est.kappa == doctest::Approx(pi * std::exp(-pi * pi * 0.1)).epsilon(1e-10));
    CHECK(est.kappa == doctest::Approx(1.171).epsilon(1e-3));

    double previous = est.kappa;
    for (double tau : {0.2, 0.4, 0.8, 1.6}) {
        const double k = estimate_smoothing_kappa(heat, b, zero, tau).kappa;
        CHECK(k > 0.0);
        CHECK(k <= previous);
        previous = k;
    }

    PointCloud pair{{StateVector{0.3, 0.0, 0.0, 0.0}, StateVector{-0.2, 0.0, 0.0, 0.0}}, ""};
    const double single = estimate_smoothing_kappa(heat, pair, zero, 0.05).kappa;
    CHECK(single == doctest::Approx(pi * std::exp(-pi * pi * 0.05)).epsilon(1e-3));
}

TEST_CASE("time Hoelder estimate") {
    const auto heat = make_process(1, Nonlinearity::linear(0.0));
    const SymbolPath zero[] = {SymbolPath::zero(1)};
    PointCloud b{{StateVector{1.0}, StateVector{0.5}, StateVector{-0.25}}, ""};
    const auto est = estimate_time_hoelder(heat, b, zero, 0.05);
    CHECK(est.gamma == 1.0);
    CHECK(est.theta == 1.0);
    CHECK(est.fitted_slope == doctest::Approx(1.0).epsilon(0.05));
    // Explicit mode formula: |(e^{-l t} - e^{-l t~})| <= l |t - t~|.
    CHECK(est.time_constant <= pi * pi * (1.0 + 1e-9));
    // Same-time state differences contract under the heat flow.
    CHECK(est.state_constant <= 1.0 + 1e-12);
    CHECK(est.C_r >= std::max(est.state_constant, est.time_constant));
    CHECK(est.tuples >= 10);
    CHECK_THROWS_AS((void)estimate_time_hoelder(heat, b, zero, 0.005), InvalidArgument);
}

TEST_CASE("symbol Lipschitz estimate") {
    const auto heat = make_process(1, Nonlinearity::linear(0.0));
    const auto e1 = StateVector::basis(1, 1);
    const SymbolPath pair[] = {SymbolPath::constant(0.5 * e1), SymbolPath::constant(2.0 * e1)};
    PointCloud b{{StateVector{0.2}}, ""};
    const std::vector<double> grid = {0.5, 1.0, 2.0, 3.0};
    const auto est = estimate_symbol_lipschitz(heat, b, pair, grid);
    REQUIRE(est.times.size() == 3);
    const double d = frechet_dist(pair[0], pair[1]);
    const double lambda = pi * pi;
    for (std::size_t i = 0; i < est.times.size(); ++i) {
        const double oracle = 1.5 * (1.0 - std::exp(-lambda * est.times[i])) / lambda / d;
        CHECK(est.measured[i] == doctest::Approx(oracle).epsilon(1e-2));
        CHECK(est.lipschitz[i] >= 1.0);
    }
    CHECK(est.beta == doctest::Approx(0.0).epsilon(1e-9));

    const auto f = Nonlinearity::saturated_cubic(1.0, 1.0, 1.0);
    const auto p = make_process(3, f);
    const auto g = bump_forcing(3, 3);
    const SymbolPath syms[] = {g, shift(g, 0.5), shift(g, 1.25)};
    PointCloud bb{{StateVector{0.1, 0.2, 0.0}, StateVector{-0.3, 0.0, 0.1}}, ""};
    const std::vector<double> ts = {1.0, 2.0, 3.0, 4.0};
    const auto gen = estimate_symbol_lipschitz(p, bb, syms, ts);
    CHECK(gen.beta <= f.lipschitz() + 0.1);

    const SymbolPath same[] = {g, g};
    CHECK_THROWS_AS((void)estimate_symbol_lipschitz(p, bb, same, ts), InvalidArgument);
}
