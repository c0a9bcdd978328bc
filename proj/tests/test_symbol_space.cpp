#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ndattr/errors.hpp"
#include "ndattr/symbol_space.hpp"

using namespace ndattr;

namespace {

SymbolPath random_path(std::mt19937_64& rng, std::size_t m, double t0, double t1, double step) {
    std::normal_distribution<double> nd;
    std::vector<double> times;
    std::vector<StateVector> values;
    const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / step));
    for (std::size_t i = 0; i <= n; ++i) {
        times.push_back(t0 + static_cast<double>(i) * step);
        StateVector v(m);
        for (std::size_t k = 0; k < m; ++k) v[k] = nd(rng);
        values.push_back(v);
    }
    return SymbolPath(times, values);
}

// Zero except a unit plateau on [2.5, 3] reached by ramps from 2 and to 3.5.
SymbolPath bump_path() {
    const auto e = StateVector::basis(1, 1);
    return SymbolPath({-10.0, 2.0, 2.5, 3.0, 3.5, 10.0},
                      {StateVector(1), StateVector(1), e, e, StateVector(1), StateVector(1)});
}

SymbolPath sine_path(double omega) {
    const double w[] = {omega};
    const StateVector a[] = {StateVector::basis(1, 1)};
    return make_quasiperiodic(w, a, -80.0, 80.0, 1.0 / 64.0);
}

}  // namespace

TEST_CASE("symbol path evaluation and extension") {
    SymbolPath p({0.0, 1.0, 2.0}, {StateVector{0.0}, StateVector{2.0}, StateVector{-2.0}});
    CHECK(p(0.5)[0] == doctest::Approx(1.0));
    CHECK(p(1.75)[0] == doctest::Approx(-1.0));
    CHECK(p(-3.0)[0] == 0.0);
    CHECK(p(9.0)[0] == -2.0);
    CHECK_THROWS_AS(SymbolPath({1.0, 1.0}, {StateVector{0.0}, StateVector{1.0}}), InvalidArgument);
    CHECK_THROWS_AS(SymbolPath({0.0, 1.0}, {StateVector{0.0}, StateVector{1.0, 2.0}}), InvalidArgument);
}

TEST_CASE("frechet_dist oracles") {
    const auto a = SymbolPath::constant(StateVector{0.0, 0.0});
    const auto b = SymbolPath::constant(StateVector{0.6, 0.8});
    CHECK(frechet_dist(a, a) == 0.0);
    CHECK(frechet_dist(a, b) == doctest::Approx(1.0).epsilon(1e-9));

    // Terms with n <= 2 vanish; each remaining term is 2^-n / 2.
    const auto z = SymbolPath::zero(1);
    const double expected = 0.5 * (0.25 - std::ldexp(1.0, -40));
    CHECK(frechet_dist(z, bump_path()) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(frechet_dist(z, bump_path(), FrechetConfig{40, 8}) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS((void)frechet_dist(a, z), InvalidArgument);
}

TEST_CASE("frechet_dist metric axioms on random triples") {
    std::mt19937_64 rng(17);
    const double tol = std::ldexp(1.0, -39);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_path(rng, 2, -6.0, 6.0, 0.5);
        const auto q = random_path(rng, 2, -6.0, 6.0, 0.5);
        const auto r = random_path(rng, 2, -6.0, 6.0, 0.5);
        const double pq = frechet_dist(p, q), qp = frechet_dist(q, p);
        CHECK(pq == doctest::Approx(qp).epsilon(1e-15));
        CHECK(pq >= 0.0);
        CHECK(pq < 2.0);
        CHECK(frechet_dist(p, p) == 0.0);
        CHECK(frechet_dist(p, r) <= pq + frechet_dist(q, r) + tol);
    }
}

TEST_CASE("paths agreeing on [-n, n] are close") {
    std::mt19937_64 rng(23);
    const auto p = random_path(rng, 1, -20.0, 20.0, 0.25);
    for (int n : {1, 3, 6}) {
        std::vector<double> times;
        std::vector<StateVector> values;
        for (double t : p.breakpoints()) {
            times.push_back(t);
            values.push_back(std::abs(t) <= n ? p(t) : StateVector{p(t)[0] + 5.0});
        }
        // The modified path ramps away from p only outside [-n, n].
        const SymbolPath q(times, values);
        CHECK(frechet_dist(p, q) <= std::ldexp(1.0, -n + 1));
    }
}

TEST_CASE("frechet_within agrees with frechet_dist") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_path(rng, 1, -4.0, 4.0, 0.5);
        const auto q = random_path(rng, 1, -4.0, 4.0, 0.5);
        const double d = frechet_dist(p, q);
        CHECK(frechet_within(p, q, d * 1.001));
        CHECK_FALSE(frechet_within(p, q, d * 0.999));
    }
}

TEST_CASE("shift group law") {
    std::mt19937_64 rng(31);
    const auto p = random_path(rng, 2, -5.0, 5.0, 0.25);
    const auto s0 = shift(p, 0.0);
    const auto back = shift(shift(p, 1.0), -1.0);
    const auto composed = shift(shift(p, 0.75), 1.5);
    const auto direct = shift(p, 2.25);
    for (double t = -6.0; t <= 6.0; t += 0.125) {
        CHECK(s0(t) == p(t));
        CHECK(back(t) == p(t));
        CHECK(composed(t) == direct(t));
        CHECK(shift(p, 0.5)(t) == p(t + 0.5));
    }
    const auto c = SymbolPath::constant(StateVector{1.5, -2.0});
    CHECK(shift(c, 7.0)(-3.0) == StateVector{1.5, -2.0});
}

TEST_CASE("driving Lipschitz envelope") {
    const auto z = SymbolPath::zero(1);
    const SymbolPath pair[] = {z, bump_path()};
    const auto rep = estimate_driving_lipschitz(FrechetConfig{}, pair, {3.0});
    CHECK(rep.holds);
    const double shifted = frechet_dist(shift(z, 3.0), shift(bump_path(), 3.0));
    CHECK(shifted <= 2.0 * std::exp(3.0 * std::numbers::ln2) * frechet_dist(z, bump_path()));

    const SymbolPath consts[] = {SymbolPath::constant(StateVector{0.0}), SymbolPath::constant(StateVector{1.0})};
    const auto cr = estimate_driving_lipschitz(FrechetConfig{}, consts);
    CHECK(cr.holds);
    CHECK(cr.max_growth == doctest::Approx(1.0));

    std::mt19937_64 rng(37);
    std::vector<SymbolPath> paths;
    for (int i = 0; i < 5; ++i) paths.push_back(random_path(rng, 1, -12.0, 12.0, 0.5));
    CHECK(estimate_driving_lipschitz(FrechetConfig{}, paths).holds);

    const SymbolPath same[] = {z, z};
    CHECK_THROWS_AS((void)estimate_driving_lipschitz(FrechetConfig{}, same), InvalidArgument);
}

TEST_CASE("build_hull") {
    const auto c = SymbolPath::constant(StateVector{2.0});
    const auto hc = build_hull(c, 3.0, 0.5);
    CHECK(hc.size() == 13);
    CHECK(hc.shifts.front() == -3.0);
    CHECK(hc.shifts.back() == 3.0);
    for (const auto& p : hc.paths) CHECK(frechet_dist(p, c) == 0.0);

    // Compactly supported bump: far shifts are nearly the zero path.
    const auto g = make_cantor_forcing(y_ball_indicator_sampler(SpatialDiscretization(3), 3), 3);
    const auto hg = build_hull(g, 60.0, 1.0);
    const auto z = SymbolPath::zero(3);
    CHECK(frechet_dist(hg.paths.front(), z) < 1e-15);
    CHECK(frechet_dist(hg.paths.back(), z) < 1e-15);

    const auto periodic = sine_path(std::numbers::pi);
    CHECK(frechet_dist(shift(periodic, 0.0), shift(periodic, 2.0)) < 1e-9);
    CHECK_THROWS_AS((void)build_hull(c, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("limit sets") {
    const auto g = make_cantor_forcing(y_ball_indicator_sampler(SpatialDiscretization(2), 2), 2);
    const auto h = build_hull(g, 64.0, 1.0);
    const SymbolPath zero[] = {SymbolPath::zero(2)};
    for (auto dir : {Direction::Forward, Direction::Backward}) {
        const auto lim = estimate_limit_sets(h, dir);
        CHECK(frechet_hausdorff(lim.paths, zero) < 1e-6);
    }

    const auto c = SymbolPath::constant(StateVector{1.0, 2.0});
    const auto lc = estimate_limit_sets(build_hull(c, 16.0, 1.0), Direction::Forward);
    for (const auto& p : lc.paths) CHECK(frechet_dist(p, c) == 0.0);

    // Period-2 sine sampled on the grid step 0.25: every tail shift has an
    // exact twin inside one period.
    const auto s = sine_path(std::numbers::pi);
    const auto ls = estimate_limit_sets(build_hull(s, 40.0, 0.25), Direction::Forward);
    std::vector<SymbolPath> orbit;
    for (int i = 0; i < 8; ++i) orbit.push_back(shift(s, 0.25 * i));
    CHECK(frechet_hausdorff(ls.paths, orbit) < 1e-6);

    // A ramp never settles.
    const SymbolPath ramp({-100.0, 100.0}, {StateVector{-100.0}, StateVector{100.0}});
    CHECK_THROWS_AS((void)estimate_limit_sets(build_hull(ramp, 32.0, 1.0), Direction::Forward), NonConvergenceError);
}

TEST_CASE("quasi-periodic generator") {
    const auto g = sine_path(2.0 * std::numbers::pi);
    CHECK(frechet_dist(g, shift(g, 1.0)) < 1e-9);
    CHECK(g(0.25)[0] == doctest::Approx(1.0));

    const double w[] = {1.0, 2.0};
    const StateVector a[] = {StateVector(2), StateVector(2)};
    const auto zero = make_quasiperiodic(w, a, -5.0, 5.0, 0.5);
    for (double t = -5.0; t <= 5.0; t += 0.25) CHECK(norm_x(zero(t)) == 0.0);
}

TEST_CASE("cantor forcing shape") {
    const int depth = 5;
    SpatialDiscretization disc(6);
    const auto sampler = y_ball_indicator_sampler(disc, depth);
    const auto g = make_cantor_forcing(sampler, depth);
    CHECK(norm_x(g(-5.0)) == 0.0);
    CHECK(norm_x(g(2.5)) == 0.0);
    CHECK(distance_x(g(-0.5), 0.5 * sampler(0)) < 1e-15);
    CHECK(distance_x(g(1.5), 0.5 * sampler((1u << depth) - 1)) < 1e-15);

    for (std::size_t addr = 0; addr < (1u << depth); ++addr) {
        const double t = cantor_address_point(addr, depth);
        CHECK(distance_x(g(t), sampler(addr)) == 0.0);
        CHECK(norm_y(sampler(addr), disc) <= 1.0 + 1e-15);
    }
    CHECK(cantor_address_point(1, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(modulus_on_grid(g, -1.0, 2.0, 1e-4) < modulus_on_grid(g, -1.0, 2.0, 1e-3));
    CHECK_THROWS_AS((void)make_cantor_forcing(sampler, 0), InvalidArgument);
    CHECK_THROWS_AS((void)y_ball_indicator_sampler(SpatialDiscretization(2), 3), InvalidArgument);
}

TEST_CASE("exponential closeness") {
    const auto e = StateVector::basis(1, 1);
    const auto z = SymbolPath::zero(1);
    {
        const auto same = fit_exponential_closeness(z, z, z);
        CHECK(same.Q2 == doctest::Approx(1.0));
    }
    {
        std::vector<double> t;
        std::vector<StateVector> v;
        for (int i = -400; i <= 400; ++i) {
            t.push_back(i / 16.0);
            v.push_back(std::exp(-std::abs(i / 16.0)) * e);
        }
        const SymbolPath g(t, v);
        const auto fit = fit_exponential_closeness(g, z, z);
        CHECK(fit.eta2 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(fit.Q2 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(fit.eta1 == doctest::Approx(1.0).epsilon(1e-6));
    }
    {
        const auto g = make_cantor_forcing(y_ball_indicator_sampler(SpatialDiscretization(2), 2), 2);
        const auto fit = fit_exponential_closeness(g, SymbolPath::zero(2), SymbolPath::zero(2));
        CHECK(fit.plus_compact);
        CHECK(fit.minus_compact);
        double gmax = 0.0;
        for (int i = 0; i <= 16; ++i) gmax = std::max(gmax, norm_x(g(i / 8.0)));
        CHECK(fit.Q2 == doctest::Approx(gmax * std::exp(2.0 * fit.eta2)));
        for (double t = 0.0; t <= 3.0; t += 1e-3) CHECK(norm_x(g(t)) <= fit.Q2 * std::exp(-fit.eta2 * t));
        for (double t = -2.0; t <= 0.0; t += 1e-3) CHECK(norm_x(g(t)) <= fit.Q1 * std::exp(fit.eta1 * t));
    }
    const SymbolPath ramp({0.0, 100.0}, {StateVector{0.0}, StateVector{100.0}});
    CHECK_THROWS_AS((void)fit_exponential_closeness(ramp, z, z), NonConvergenceError);
}
