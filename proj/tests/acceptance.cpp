// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ndattr/dimension.hpp"
#include "ndattr/harness.hpp"

using namespace ndattr;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Process make_process(std::size_t m, Nonlinearity f, double h = 1e-3) {
    ProcessConfig cfg;
    cfg.disc = SpatialDiscretization(m);
    cfg.nonlinearity = std::move(f);
    cfg.h = h;
    return Process(cfg);
}

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

PointCloud interval_probes(std::size_t n) {
    PointCloud b;
    for (std::size_t i = 0; i < n; ++i) b.elements.push_back(StateVector{-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1)});
    return b;
}

Outcome ac1() {
    std::mt19937_64 rng(1001);
    const double tol = std::ldexp(1.0, -39);
    double worst_sym = 0.0, worst_tri = -INFINITY, worst_id = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_path(rng, 2, -8.0, 8.0, 0.5);
        const auto q = random_path(rng, 2, -8.0, 8.0, 0.5);
        const auto r = random_path(rng, 2, -8.0, 8.0, 0.5);
        const double pq = frechet_dist(p, q), qr = frechet_dist(q, r), pr = frechet_dist(p, r);
        worst_sym = std::max(worst_sym, std::abs(pq - frechet_dist(q, p)));
        worst_id = std::max(worst_id, frechet_dist(p, p));
        worst_tri = std::max(worst_tri, pr - pq - qr);
    }
    const double unit = frechet_dist(SymbolPath::constant(StateVector{0.0, 0.0}), SymbolPath::constant(StateVector{0.6, 0.8}));
    const bool pass = worst_sym <= tol && worst_id <= tol && worst_tri <= tol && std::abs(unit - 1.0) <= 1e-9;
    return {pass, fmt("symmetry %.3g, triangle excess %.3g, constant pair %.15g", worst_sym, worst_tri, unit)};
}

Outcome ac2() {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng() % 6);
        const double h = std::ldexp(1.0, -8 - static_cast<int>(rng() % 3));
        auto f = (i % 2 == 0) ? Nonlinearity::linear(2.0 * uni(rng))
                              : Nonlinearity::saturated_cubic(1.0 + uni(rng) * 0.5, 1.0, 1.0 + std::abs(uni(rng)));
        const auto p = make_process(m, std::move(f), h);
        const auto g = random_path(rng, m, -4.0, 8.0, 0.25);
        StateVector u(m);
        for (std::size_t k = 0; k < m; ++k) u[k] = uni(rng);
        const double s = 8 * h, r = 200 * h, t = 500 * h;
        const double identity = distance_x(p.evolve(u, g, s, s), u);
        const double cocycle = distance_x(p.evolve(p.evolve(u, g, s, r), g, r, t), p.evolve(u, g, s, t));
        const double translation = verify_translation_property(p, u, g, 64 * h, s, t);
        worst = std::max({worst, identity, cocycle, translation});
    }
    return {worst <= 1e-12, fmt("max residual %.3g over 100 configurations", worst)};
}

Outcome ac3() {
    const auto heat = make_process(8, Nonlinearity::linear(0.0));
    const double got = norm_x(heat.evolve(StateVector::basis(8, 1), SymbolPath::zero(8), 0.0, 1.0));
    const double want = std::exp(-pi * pi);
    const double rel = std::abs(got - want) / want;
    return {rel <= 1e-12, fmt("|U(1,0)e1| = %.17g, relative error %.3g", got, rel)};
}

Outcome ac4() {
    PointCloud cantor;
    for (std::size_t a = 0; a < 1024; ++a) cantor.elements.push_back(StateVector{cantor_address_point(a, 10)});
    std::vector<double> r3, r2;
    for (int k = 2; k <= 8; ++k) r3.push_back(std::pow(3.0, -k));
    for (int k = 2; k <= 10; ++k) r2.push_back(std::pow(2.0, -k));
    PointCloud segment;
    for (int i = 0; i < 10000; ++i) segment.elements.push_back(StateVector{i / 9999.0});
    const PointCloud finite{{StateVector{0.0}, StateVector{1.0}, StateVector{2.5}}, ""};
    const double sc = estimate_box_dim(cantor, r3).slope;
    const double ss = estimate_box_dim(segment, r2).slope;
    const double sf = estimate_box_dim(finite, r2).slope;
    const bool pass = std::abs(sc - std::log(2.0) / std::log(3.0)) <= 0.05 && std::abs(ss - 1.0) <= 0.05 && sf == 0.0;
    return {pass, fmt("cantor %.4f, segment %.4f, finite %.4f", sc, ss, sf)};
}

Outcome ac5() {
    const auto p = make_process(1, Nonlinearity::linear(1.0));
    const auto b = interval_probes(201);
    const SymbolPath syms[] = {SymbolPath::zero(1), SymbolPath::constant(StateVector{0.5})};
    const double tau = 0.0625;
    const double kappa = estimate_smoothing_kappa(p, b, syms, tau).kappa;
    const auto rep = check_covering_induction(p, b, syms, 1.0, 0.5, tau, kappa, 3);
    std::string detail = fmt("kappa %.4f, N_nu %.0f, counts", kappa, static_cast<double>(rep.N_nu));
    for (std::size_t i = 0; i < rep.counts.size(); ++i) detail += fmt(" %.0f/%.0f", static_cast<double>(rep.counts[i]), rep.limits[i]);
    return {rep.holds && rep.counts.size() == 3, detail};
}

Outcome ac6() {
    const auto p = make_process(1, Nonlinearity::linear(1.0));
    const auto zero = SymbolPath::zero(1);
    const auto hull = build_hull(zero, 1.0, 1.0);
    const auto b = interval_probes(41);
    const SymbolPath syms[] = {zero};
    ExpAttractorOptions o;
    o.nu = 0.5;
    o.R = 1.0;
    o.tau = 0.125;
    o.n_max = 5;
    o.kappa = estimate_smoothing_kappa(p, b, syms, o.tau).kappa;
    const auto build = build_discrete_exp_attractor(p, b, hull, o);
    const auto rep = check_exponential_attraction(p, build, b, syms);
    std::string detail = "dist/envelope";
    for (std::size_t i = 0; i < rep.measured.size(); ++i) detail += fmt(" %.3g/%.3g", rep.measured[i], rep.envelope[i]);
    return {rep.pass && rep.measured.size() == 5, detail};
}

Outcome ac7() {
    const auto heat = make_process(1, Nonlinearity::linear(0.0));
    std::vector<double> t;
    std::vector<StateVector> v;
    for (int i = -40 * 64; i <= 40 * 64; ++i) {
        t.push_back(i / 64.0);
        v.push_back(StateVector{std::exp(-std::abs(i / 64.0))});
    }
    const SymbolPath g(t, v);
    AbsorbingReport absorb;
    absorb.R_absorb = 1.0;
    absorb.tau_absorb = 0.25;
    PullbackOptions opts;
    opts.ensemble = 2;
    opts.tolerance = 1e-10;
    std::vector<double> times;
    for (int i = -16; i <= 16; ++i) times.push_back(0.5 * i);
    const auto family = compute_pullback_family(heat, g, times, absorb, opts);
    const PointCloud origin{{StateVector{0.0}}, ""};
    const auto fit = fit_semicontinuity_rate(family, origin, origin);
    bool pass = true;
    std::string detail;
    for (const auto* side : {&fit.plus, &fit.minus}) {
        pass = pass && side->monotone && side->preferred == "exp" && side->residual_ratio < 0.5;
        detail += std::string(side == &fit.plus ? "plus" : "minus") + fmt(" xi %.4f ratio %.3g; ", side->xi, side->residual_ratio);
    }
    return {pass, detail};
}

Outcome ac8() {
    const double worked = 6.0 + 2.0 / std::log(2.0) + 1.0;
    const double u7 = bound_union_pullback(1, 1, DecayModel::Polynomial, 1, 0.5, 1, 16);
    const double u6 = bound_union_pullback(1, 1, DecayModel::Exponential, 1, 0.5, 1, 16);
    const double ua = bound_uniform_attractor_dim(0.5, 1, 16, 0.5, 0.5, 2, 1, 0);
    const double ea = bound_exp_attractor_dim(0.5, 0.5, 1, 16, 1, 1, 0, 2);
    bool pass = std::abs(u7 - 7.0) <= 1e-9 && std::abs(u6 - 6.0) <= 1e-9 && std::abs(ua - worked) <= 1e-9 &&
                std::abs(ea - worked) <= 1e-9;

    // Sweeps over every argument of each bound.
    using Fn = std::function<double(const std::vector<double>&)>;
    struct Sweep {
        Fn f;
        std::vector<double> base;
        std::vector<int> direction;  // +1 non-decreasing, -1 non-increasing, 0 skipped
    };
    const std::vector<Sweep> sweeps = {
        {[](const std::vector<double>& a) {
             return bound_union_pullback(a[0], a[1], DecayModel::Polynomial, a[2], a[3], a[4], a[5]);
         },
         {1, 1, 1, 0.5, 0.5, 16},
         {1, 1, 0, -1, -1, 1}},
        {[](const std::vector<double>& a) {
             return bound_uniform_attractor_dim(a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]);
         },
         {0.5, 0.5, 16, 0.3, 0.4, 2, 0.7, 0.9},
         {-1, -1, 1, 1, 1, 1, 1, 1}},
        {[](const std::vector<double>& a) {
             return bound_exp_attractor_dim(0.5, a[0], a[1], a[2], a[3], a[4], a[5], a[6]);
         },
         {0.5, 0.5, 16, 1, 0.3, 0.4, 2},
         {-1, -1, 1, 1, 1, 1, 1}},
    };
    int violations = 0;
    for (const auto& s : sweeps) {
        for (std::size_t idx = 0; idx < s.base.size(); ++idx) {
            if (s.direction[idx] == 0) continue;
            double previous = NAN;
            for (double scale : {0.5, 0.75, 1.0, 1.25, 1.5, 2.0}) {
                auto a = s.base;
                a[idx] *= scale;
                const bool exponent = s.direction[idx] < 0;
                if (exponent && a[idx] > 1.0) continue;
                const double v = s.f(a);
                if (!std::isnan(previous) && s.direction[idx] * (v - previous) < 0.0) ++violations;
                previous = v;
            }
        }
    }
    pass = pass && violations == 0;
    return {pass, fmt("union %.12g and %.12g, uniform %.12g", u7, u6, ua) +
                      fmt(", exp %.12g; sweep violations %.0f", ea, violations)};
}

Outcome ac9() {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = load_experiment(fs::path(NDATTR_SOURCE_DIR) / "configs" / "cantor-showcase.cfg");
    const auto out = fs::temp_directory_path() / "ndattr_acceptance_showcase";
    fs::remove_all(out);
    const auto rep = run_experiment(cfg, out);
    write_report(rep, out);
    const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
    const auto* inc = rep.find_check("hull_dimension_increasing");
    const auto* fixed = rep.find_check("bound_independent_of_depth");
    bool within = true;
    int seen = 0;
    for (const auto& c : rep.checks) {
        if (c.name.size() >= 20 && c.name.ends_with("uniform_within_bound")) {
            ++seen;
            within = within && c.pass;
        }
    }
    std::string detail = "hull d_B";
    for (const auto& [label, v] : rep.data["variants"].items()) {
        if (v.contains("dimension") && v["dimension"].contains("hull")) detail += fmt(" %.4f", v["dimension"]["hull"]["slope"].get<double>());
    }
    if (!rep.data["variants"].empty()) {
        const auto& first = *rep.data["variants"].begin();
        if (first.contains("bounds")) detail += fmt(", bound %.6g", first["bounds"]["uniform_attractor"].get<double>());
    }
    detail += fmt(", %.1f min", minutes);
    const bool pass = rep.status == ErrorCode::Ok && inc && inc->pass && fixed && fixed->pass && seen == 3 && within &&
                      minutes < 30.0;
    return {pass, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"AC1 frechet metric axioms", ac1},       {"AC2 process axioms", ac2},
        {"AC3 exact linear decay", ac3},          {"AC4 box-dimension calibration", ac4},
        {"AC5 covering induction", ac5},          {"AC6 exponential attraction", ac6},
        {"AC7 semicontinuity rate", ac7},         {"AC8 closed-form bounds", ac8},
        {"AC9 cantor showcase", ac9},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
