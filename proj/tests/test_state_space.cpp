#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ndattr/errors.hpp"
#include "ndattr/state_space.hpp"

using namespace ndattr;
using std::numbers::pi;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::normal_distribution<double> nd;
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) {
        StateVector u(m);
        for (std::size_t k = 0; k < m; ++k) u[k] = nd(rng);
        c.elements.push_back(u);
    }
    return c;
}

PointCloud grid_1d(double a, double b, double step) {
    PointCloud c;
    const auto n = static_cast<std::size_t>(std::llround((b - a) / step));
    for (std::size_t i = 0; i <= n; ++i) c.elements.push_back(StateVector{a + static_cast<double>(i) * step});
    return c;
}

}  // namespace

TEST_CASE("discretization eigenvalues") {
    SpatialDiscretization d(4, 2.0);
    CHECK(d.eigenvalue(0) == doctest::Approx(pi * pi / 4.0));
    CHECK(d.eigenvalue(3) == doctest::Approx(4.0 * pi * pi));
    for (std::size_t i = 1; i < d.modes(); ++i) CHECK(d.eigenvalue(i) > d.eigenvalue(i - 1));
    CHECK(d.fractional_weight(1) == doctest::Approx(std::pow(d.eigenvalue(1), 0.25)));
    CHECK_THROWS_AS(SpatialDiscretization(0), InvalidArgument);
    CHECK_THROWS_AS(SpatialDiscretization(2, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("norm_x oracles") {
    CHECK(norm_x(StateVector(5)) == 0.0);
    CHECK(norm_x(StateVector::basis(5, 1)) == 1.0);
    CHECK(norm_x(StateVector{3.0, 4.0, 0.0}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("norm_y oracles") {
    SpatialDiscretization d1(1), d2(2);
    CHECK(norm_y(StateVector(1), d1) == 0.0);
    CHECK(norm_y(StateVector{1.0}, d1) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(norm_y(StateVector{0.0, 1.0}, d2) == doctest::Approx(2.0 * pi).epsilon(1e-15));
    CHECK_THROWS_AS((void)norm_y(StateVector{1.0}, d2), InvalidArgument);
}

TEST_CASE("norm_y dominates sqrt(lambda_1) norm_x") {
    std::mt19937_64 rng(3);
    SpatialDiscretization d(6, 1.7);
    for (const auto& u : random_cloud(rng, 500, 6).elements) {
        CHECK(norm_y(u, d) >= std::sqrt(d.eigenvalue(0)) * norm_x(u) * (1.0 - 1e-15));
    }
}

TEST_CASE("hausdorff semi-distance oracles") {
    const auto e = StateVector::basis(3, 1);
    PointCloud zero{{StateVector(3)}, ""};
    PointCloud both{{StateVector(3), 3.0 * e}, ""};
    CHECK(hausdorff_semidist(both, both) == 0.0);
    CHECK(hausdorff_semidist(zero, both) == 0.0);
    CHECK(hausdorff_semidist(both, zero) == doctest::Approx(3.0));
    CHECK(hausdorff_dist(zero, both) == doctest::Approx(3.0));
    CHECK_THROWS_AS((void)hausdorff_semidist(PointCloud{}, zero), InvalidArgument);
}

TEST_CASE("hausdorff triangle property on random triples") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_cloud(rng, 12, 3), b = random_cloud(rng, 9, 3), c = random_cloud(rng, 15, 3);
        CHECK(hausdorff_semidist(a, c) <= hausdorff_semidist(a, b) + hausdorff_semidist(b, c) + 1e-12);
    }
}

TEST_CASE("greedy cover oracles") {
    PointCloud single{{StateVector{0.7, -2.0}}, ""};
    CHECK(greedy_cover_count(single, 1e-9) == 1);

    // Linear-scan oracle over the sorted grid: a new center opens at the
    // first point farther than r from the previous center.
    const auto grid = grid_1d(0.0, 1.0, 0.01);
    const auto cover = greedy_cover(grid, 0.3);
    REQUIRE(cover.count == 4);
    CHECK(cover.centers[0][0] == doctest::Approx(0.0));
    CHECK(cover.centers[1][0] == doctest::Approx(0.31));
    CHECK(cover.centers[2][0] == doctest::Approx(0.62));
    CHECK(cover.centers[3][0] == doctest::Approx(0.93));

    PointCloud pair{{StateVector{0.0}, StateVector{1.0}}, ""};
    CHECK(greedy_cover_count(pair, 0.4) == 2);
    CHECK_THROWS_AS((void)greedy_cover(pair, 0.0), InvalidArgument);
    CHECK_THROWS_AS((void)greedy_cover(PointCloud{}, 1.0), InvalidArgument);
}

TEST_CASE("greedy cover is feasible and monotone in r") {
    std::mt19937_64 rng(5);
    const auto k = random_cloud(rng, 400, 3);
    std::size_t previous = k.size() + 1;
    for (double r : {0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
        const auto cover = greedy_cover(k, r);
        CHECK(cover.count == cover.centers.size());
        CHECK(cover.count <= previous);
        previous = cover.count;
        PointCloud centers{cover.centers, ""};
        CHECK(hausdorff_semidist(k, centers) <= r * (1.0 + kCoverSlack));
    }
}

TEST_CASE("unit_ball_Y_cover_count oracles") {
    SpatialDiscretization d1(1);
    CHECK(unit_ball_Y_cover_count(d1, 1.0 / pi) == 1);
    CHECK(unit_ball_Y_cover_count(d1, 1.0 / (3.0 * pi)) == 3);
    SpatialDiscretization d5(5, 1.3);
    CHECK(unit_ball_Y_cover_count(d5, 1.0 / std::sqrt(d5.eigenvalue(0))) == 1);
    CHECK(unit_ball_Y_cover_count(d5, 10.0) == 1);
    CHECK_THROWS_AS((void)unit_ball_Y_cover_count(d5, 0.0), InvalidArgument);
}

TEST_CASE("unit_ball_Y_cover_count is non-increasing in rho") {
    SpatialDiscretization d(4);
    std::uint64_t previous = UINT64_MAX;
    for (double rho = 0.01; rho < 0.4; rho *= 1.3) {
        const auto n = unit_ball_Y_cover_count(d, rho);
        CHECK(n <= previous);
        previous = n;
    }
}
