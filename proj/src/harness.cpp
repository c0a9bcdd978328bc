#include "ndattr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "ndattr/io.hpp"
#include "ndattr/sampling.hpp"

namespace ndattr {

bool RunReport::all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

int RunReport::exit_code() const {
    if (status != ErrorCode::Ok) return static_cast<int>(status);
    return all_checks_pass() ? 0 : static_cast<int>(ErrorCode::CheckFailure);
}

const CheckResult* RunReport::find_check(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// JSON views

Json to_json(const DimensionReport& rep) {
    Json j;
    j["radii"] = rep.radii;
    j["counts"] = rep.counts;
    j["slope"] = rep.slope;
    j["window"] = {rep.window_first, rep.window_last};
    j["ci"] = rep.ci;
    j["degenerate"] = rep.degenerate;
    j["note"] = rep.note;
    return j;
}

Json to_json(const CoverResult& cover) {
    Json j;
    j["radius"] = cover.radius;
    j["count"] = cover.count;
    Json centers = Json::array();
    for (const auto& c : cover.centers) {
        centers.push_back(std::vector<double>(c.coefficients().begin(), c.coefficients().end()));
    }
    j["centers"] = centers;
    return j;
}

Json to_json(const DecayFit& fit) {
    Json j;
    j["times"] = fit.times;
    j["distances"] = fit.distances;
    j["t_tilde"] = fit.t_tilde;
    j["exact"] = fit.exact;
    j["monotone"] = fit.monotone;
    j["a1_holds"] = fit.a1_holds;
    j["c_bar"] = fit.c_bar;
    j["xi"] = fit.xi;
    j["exp_rss"] = fit.exp_rss;
    j["K"] = fit.K;
    j["r"] = fit.r;
    j["poly_rss"] = fit.poly_rss;
    j["preferred"] = fit.preferred;
    j["residual_ratio"] = fit.residual_ratio;
    return j;
}

Json to_json(const AttractionReport& rep) {
    Json j;
    j["levels"] = rep.levels;
    j["measured"] = rep.measured;
    j["envelope"] = rep.envelope;
    j["ratios"] = rep.ratios;
    j["fitted_rate"] = rep.fitted_rate;
    j["pass"] = rep.pass;
    return j;
}

namespace {

Json config_echo(const ExperimentConfig& c) {
    Json j;
    j["scenario"] = c.scenario;
    j["seed"] = c.seed;
    j["modes"] = c.process.disc.modes();
    j["length"] = c.process.disc.length();
    j["h"] = c.process.h;
    j["nonlinearity"] = c.process.nonlinearity.name();
    j["lip"] = c.process.nonlinearity.lipschitz();
    j["C0"] = c.process.nonlinearity.c0();
    j["C1"] = c.process.nonlinearity.c1();
    j["forcing"] = c.forcing.type;
    if (c.forcing.type == "cantor") j["depths"] = c.forcing.depths;
    j["stages"] = c.stages;
    j["tolerances"] = {{"pullback", c.tol_pullback},
                       {"limit_sets", c.tol_limit},
                       {"axioms", c.tol_axioms},
                       {"decay", c.tol_decay},
                       {"margin", c.margin}};
    return j;
}

std::string sanitize(const std::string& label) {
    std::string out;
    for (char ch : label) {
        if (std::isalnum(static_cast<unsigned char>(ch))) out.push_back(ch);
    }
    return out.empty() ? "variant" : out;
}

HullApproximation stride_subset(const HullApproximation& hull, std::size_t count) {
    HullApproximation sub;
    sub.source = hull.source;
    sub.metric = hull.metric;
    const std::size_t n = hull.paths.size();
    const std::size_t k = std::min(count, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx = k == 1 ? n / 2 : (i * (n - 1)) / (k - 1);
        sub.shifts.push_back(hull.shifts[idx]);
        sub.paths.push_back(hull.paths[idx]);
    }
    return sub;
}

bool has_distinct(const std::vector<SymbolPath>& paths, const FrechetConfig& metric) {
    for (std::size_t i = 1; i < paths.size(); ++i) {
        if (frechet_dist(paths[0], paths[i], metric) > 0.0) return true;
    }
    return false;
}

/// u f(u) <= -C0 u^2 + C1 |u| on a dense grid.
bool sign_condition_holds(const Nonlinearity& f, double c0, double c1) {
    for (int i = -20000; i <= 20000; ++i) {
        const double u = i * 1e-3;
        if (u * f(u) > -c0 * u * u + c1 * std::abs(u) + 1e-12 * (1.0 + u * u)) return false;
    }
    return true;
}

struct StageClock {
    Json& timing;
    std::string key;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~StageClock() {
        timing[key] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void require_stage(const std::set<std::string>& stages, const std::string& stage, const std::string& dep) {
    if (stages.count(stage) && !stages.count(dep)) {
        throw InvalidArgument("stage '" + stage + "' requires stage '" + dep + "'");
    }
}

class Runner {
public:
    Runner(const ExperimentConfig& cfg, std::filesystem::path out) : cfg_(cfg), out_(std::move(out)) {
        for (const auto& s : cfg.stages) stages_.insert(s);
        require_stage(stages_, "absorb", "hull");
        require_stage(stages_, "pullback", "absorb");
        require_stage(stages_, "uniform", "absorb");
        require_stage(stages_, "expattractor", "absorb");
        require_stage(stages_, "bounds", "absorb");
        require_stage(stages_, "dimension", "hull");
    }

    RunReport run() {
        report_.data["schema_version"] = kReportSchemaVersion;
        report_.data["config"] = config_echo(cfg_);
        Json stage_list = Json::array();
        for (const auto& s : known_stages()) {
            if (stages_.count(s)) stage_list.push_back(s);
        }
        report_.data["stages"] = stage_list;
        report_.data["variants"] = Json::array();
        if (stages_.empty()) {
            finish();
            return report_;
        }
        try {
            const Process process(cfg_.process);
            const auto variants = make_forcing_variants(cfg_);
            for (const auto& v : variants) run_variant(process, v);
            cross_variant_checks(variants);
        } catch (const Error& e) {
            report_.status = e.code();
            report_.error = e.what();
        } catch (const std::exception& e) {
            report_.status = ErrorCode::CheckFailure;
            report_.error = e.what();
        }
        finish();
        return report_;
    }

private:
    bool wants(const std::string& s) const { return stages_.count(s) > 0; }

    void check(const std::string& name, bool pass, const std::string& detail) {
        report_.checks.push_back({name, pass, detail});
    }

    void finish() {
        Json checks = Json::array();
        for (const auto& c : report_.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        report_.data["checks"] = checks;
        report_.data["status"] = report_.status == ErrorCode::Ok ? (report_.all_checks_pass() ? "ok" : "check_failure")
                                                                 : Error(report_.status, "").kind();
        if (!report_.error.empty()) report_.data["error"] = report_.error;
        report_.data["exit_code"] = report_.exit_code();
    }

    void run_variant(const Process& process, const ForcingVariant& v) {
        Json vj;
        vj["label"] = v.label;
        if (v.depth > 0) vj["depth"] = v.depth;
        const auto dir = out_ / sanitize(v.label);
        const std::string tkey = v.label + "/";
        const std::size_t m = process.modes();
        const std::string prefix = v.label + ":";

        HullApproximation hull, symbols;
        double dsigma_plus = 0.0, dsigma_minus = 0.0;
        bool have_dsigma = false;
        if (wants("hull")) {
            StageClock clock{report_.timing, tkey + "hull"};
            hull = build_hull(v.g, cfg_.hull_extent, cfg_.hull_resolution, cfg_.metric);
            symbols = stride_subset(hull, cfg_.symbol_sample);
            Json hj;
            hj["size"] = hull.size();
            hj["extent"] = cfg_.hull_extent;
            hj["resolution"] = cfg_.hull_resolution;
            hj["symbols"] = symbols.shifts;
            if (v.has_limits) {
                const auto wide = build_hull(v.g, cfg_.limit_extent, cfg_.limit_resolution, cfg_.metric);
                LimitSetOptions lopts;
                lopts.tolerance = cfg_.tol_limit;
                const auto fwd = estimate_limit_sets(wide, Direction::Forward, lopts);
                const auto bwd = estimate_limit_sets(wide, Direction::Backward, lopts);
                const auto radii = geometric_radii(cfg_.hull_r0, cfg_.hull_ratio, cfg_.hull_count);
                dsigma_plus = estimate_box_dim(fwd, radii).slope;
                dsigma_minus = estimate_box_dim(bwd, radii).slope;
                have_dsigma = true;
                hj["limit_sets"] = {{"forward_size", fwd.size()},
                                    {"backward_size", bwd.size()},
                                    {"tolerance", cfg_.tol_limit},
                                    {"d_sigma_plus", dsigma_plus},
                                    {"d_sigma_minus", dsigma_minus}};
            }
            vj["hull"] = hj;
            write_symbol_csv(v.g, dir / "forcing.csv");
        }

        AbsorbingReport absorb;
        PointCloud b;
        HypothesisEstimates est;
        std::uint64_t n_nu = 1;
        if (wants("absorb")) {
            StageClock clock{report_.timing, tkey + "absorb"};
            AbsorbingOptions aopts;
            aopts.trial_taus = cfg_.trial_taus;
            aopts.probe_count = cfg_.probes;
            aopts.seed = cfg_.seed;
            absorb = find_absorbing(process, symbols, cfg_.trial_radii, aopts);
            b = absorbing_sample(m, absorb, cfg_.probes, cfg_.seed);
            write_cloud_csv(b, dir / "absorbing_sample.csv");
            est.R_absorb = absorb.R_absorb;
            est.tau_absorb = absorb.tau_absorb;
            est.kappa_tau = estimate_smoothing_kappa(process, b, symbols.paths, absorb.tau_absorb).kappa;
            const double r = std::max(absorb.tau_absorb, 8.0 * process.h());
            const auto hoelder = estimate_time_hoelder(process, b, symbols.paths, r);
            est.theta_hoelder = hoelder.theta;
            est.gamma_hoelder = hoelder.gamma;
            est.C_r = hoelder.C_r;
            est.P = 2.0;
            est.zeta = std::numbers::ln2;
            Json sym = {{"distinct", false}};
            if (symbols.size() >= 2 && has_distinct(symbols.paths, cfg_.metric)) {
                const std::vector<double> grid = {1.0, 2.0, 3.0, 4.0};
                const auto lip = estimate_symbol_lipschitz(process, b, symbols.paths, grid, cfg_.metric);
                est.c1 = lip.c1;
                est.beta = lip.beta;
                const auto drive = estimate_driving_lipschitz(cfg_.metric, symbols.paths);
                sym = {{"distinct", true},
                       {"times", lip.times},
                       {"lipschitz", lip.lipschitz},
                       {"driving_envelope_holds", drive.holds},
                       {"driving_worst_ratio", drive.worst_ratio}};
                check(prefix + "driving_lipschitz", drive.holds, "shift envelope 2 e^{t ln 2}");
            }
            if (v.has_limits) {
                const auto close = fit_exponential_closeness(v.g, v.g_plus, v.g_minus);
                est.eta1 = close.eta1;
                est.eta2 = close.eta2;
                est.Q1 = close.Q1;
                est.Q2 = close.Q2;
            }
            n_nu = smoothing_cover_number(process.config().disc, cfg_.nu, est.kappa_tau);
            Json evidence = Json::array();
            for (const auto& e : absorb.evidence) evidence.push_back({{"t", e.t}, {"max_norm", e.max_norm}});
            vj["absorbing"] = {{"R", absorb.R_absorb},
                               {"tau", absorb.tau_absorb},
                               {"trajectories", absorb.trajectories},
                               {"evidence", evidence}};
            vj["hypotheses"] = {{"kappa_tau", est.kappa_tau},
                                {"N_nu", n_nu},
                                {"theta", est.theta_hoelder},
                                {"theta_fitted", hoelder.fitted_slope},
                                {"gamma", est.gamma_hoelder},
                                {"C_r", est.C_r},
                                {"hoelder_joint_residual", hoelder.joint_residual},
                                {"c1", est.c1},
                                {"beta", est.beta},
                                {"P", est.P},
                                {"zeta", est.zeta},
                                {"eta1", est.eta1},
                                {"eta2", est.eta2},
                                {"Q1", est.Q1},
                                {"Q2", est.Q2},
                                {"symbols", sym}};
        }

        PullbackOptions popts;
        popts.ensemble = cfg_.ensemble;
        popts.initial_lookback = cfg_.initial_lookback;
        popts.max_lookback = cfg_.max_lookback;
        popts.tolerance = cfg_.tol_pullback;
        popts.seed = cfg_.seed;

        if (wants("pullback")) {
            StageClock clock{report_.timing, tkey + "pullback"};
            std::vector<double> times;
            const double spacing = cfg_.family_stride * absorb.tau_absorb;
            for (int i = -cfg_.family_span; i <= cfg_.family_span; ++i) times.push_back(i * spacing);
            const auto family = compute_pullback_family(process, v.g, times, absorb, popts);
            write_family(family, dir / "family");
            const double inv = invariance_residual(process, v.g, family);
            double worst_norm = 0.0;
            for (const auto& s : family.snapshots) worst_norm = std::max(worst_norm, s.max_norm());
            Json pj;
            pj["times"] = family.times;
            pj["lookbacks"] = family.lookbacks;
            pj["tolerance"] = family.tolerance;
            pj["ensemble"] = family.ensemble;
            pj["invariance_residual"] = inv;
            pj["max_norm"] = worst_norm;
            check(prefix + "invariance", inv <= 5.0 * cfg_.tol_pullback, "adjacent-time residual <= 5 tol");
            check(prefix + "absorbing_consistency", worst_norm <= absorb.R_absorb * (1.0 + kCoverSlack),
                  "A(t) inside the absorbing ball");
            if (v.has_limits) {
                const auto m_plus = compute_pullback_attractor(process, v.g_plus, 0.0, absorb, popts).cloud;
                const auto m_minus = compute_pullback_attractor(process, v.g_minus, 0.0, absorb, popts).cloud;
                const auto fit = fit_semicontinuity_rate(family, m_plus, m_minus);
                pj["semicontinuity"] = {{"plus", to_json(fit.plus)}, {"minus", to_json(fit.minus)}};
                UnionBoundInputs in;
                const auto cloud_radii = geometric_radii(cfg_.cloud_r0, cfg_.cloud_ratio, cfg_.cloud_count);
                in.d_plus = estimate_box_dim(m_plus, cloud_radii).slope;
                in.d_minus = estimate_box_dim(m_minus, cloud_radii).slope;
                in.theta = est.theta_hoelder;
                in.gamma = est.gamma_hoelder;
                in.n_cover = static_cast<double>(n_nu);
                in.R = absorb.R_absorb;
                in.nu = cfg_.nu;
                in.radii = cloud_radii;
                const auto sweep = sweep_union_dimension(family, fit, in);
                Json counts = Json::array();
                for (const auto& c : sweep.snapshot_counts) {
                    counts.push_back({{"n", c.n}, {"radius", c.radius}, {"max_count", c.max_count}, {"limit", c.limit},
                                      {"holds", c.holds}});
                }
                pj["union"] = {{"dimension", to_json(sweep.dimension)},
                               {"a1_holds", sweep.a1_holds},
                               {"model", sweep.model},
                               {"r", std::isfinite(sweep.r) ? sweep.r : 0.0},
                               {"bound_claimed", sweep.bound_claimed},
                               {"bound", sweep.bound},
                               {"within_bound", sweep.within_bound},
                               {"snapshot_counts", counts}};
                if (sweep.bound_claimed) check(prefix + "union_within_bound", sweep.within_bound, "d_B(union A(t))");
                check(prefix + "snapshot_counts", sweep.snapshot_counts_hold, "N(A(i tau), R nu^n) <= N^n");
            }
            vj["pullback"] = pj;
        }

        PointCloud uniform_cloud;
        if (wants("uniform")) {
            StageClock clock{report_.timing, tkey + "uniform"};
            const auto ua = compute_uniform_attractor(process, symbols, absorb, popts);
            uniform_cloud = ua.cloud;
            write_cloud_csv(uniform_cloud, dir / "uniform_attractor.csv");
            Json lookbacks = Json::array();
            for (const auto& r : ua.per_symbol) lookbacks.push_back(r.lookback);
            vj["uniform"] = {{"size", uniform_cloud.size()},
                             {"symbols", symbols.size()},
                             {"lookbacks", lookbacks},
                             {"max_norm", uniform_cloud.max_norm()}};
        }

        PointCloud m_discrete, m_continuous;
        if (wants("expattractor")) {
            StageClock clock{report_.timing, tkey + "expattractor"};
            const auto bb = absorbing_sample(m, absorb, cfg_.build_sample, cfg_.seed);
            ExpAttractorOptions eo;
            eo.nu = cfg_.nu;
            eo.R = absorb.R_absorb;
            eo.tau = absorb.tau_absorb;
            eo.n_max = cfg_.levels;
            eo.P = est.P;
            eo.zeta = est.zeta;
            eo.c1 = est.c1;
            eo.beta = est.beta;
            eo.kappa = est.kappa_tau;
            const auto build = build_discrete_exp_attractor(process, bb, symbols, eo);
            const auto attraction = check_exponential_attraction(process, build, bb, symbols.paths);
            m_discrete = build.states();
            m_continuous = extend_continuous_attractor(process, build, 0.25 * absorb.tau_absorb);
            write_cloud_csv(m_discrete, dir / "M_d.csv");
            write_cloud_csv(m_continuous, dir / "M.csv");
            Json levels = Json::array();
            for (const auto& l : build.levels) {
                levels.push_back({{"n", l.n},
                                  {"symbol_radius", l.symbol_radius},
                                  {"state_radius", l.state_radius},
                                  {"symbol_centers", l.symbol_centers.size()},
                                  {"image_counts", l.image_counts},
                                  {"lifted", l.lifted},
                                  {"accumulated", l.accumulated},
                                  {"union_size", l.union_size},
                                  {"cardinality_limit", l.cardinality_limit},
                                  {"induction_holds", l.induction_holds}});
            }
            vj["expattractor"] = {{"nu", eo.nu},
                                  {"R", eo.R},
                                  {"tau", eo.tau},
                                  {"N_nu", build.N_nu},
                                  {"levels", levels},
                                  {"discrete_size", build.discrete.size()},
                                  {"continuous_size", m_continuous.size()},
                                  {"induction_holds", build.induction_holds},
                                  {"cardinality_holds", build.cardinality_holds},
                                  {"attraction", to_json(attraction)}};
            check(prefix + "exponential_attraction", attraction.pass, "dist_H(S(n tau) B, M_d) <= 6 R nu^n");
        }

        double uniform_dim = -1.0;
        if (wants("dimension")) {
            StageClock clock{report_.timing, tkey + "dimension"};
            Json dj;
            const auto hull_radii = geometric_radii(cfg_.hull_r0, cfg_.hull_ratio, cfg_.hull_count);
            const auto hull_dim = estimate_box_dim(hull, hull_radii);
            dj["hull"] = to_json(hull_dim);
            const auto cloud_radii = geometric_radii(cfg_.cloud_r0, cfg_.cloud_ratio, cfg_.cloud_count);
            if (!uniform_cloud.empty()) {
                const auto ud = estimate_box_dim(uniform_cloud, cloud_radii);
                uniform_dim = ud.slope;
                dj["uniform"] = to_json(ud);
            }
            if (!m_discrete.empty()) {
                dj["M_d"] = to_json(estimate_box_dim(m_discrete, cloud_radii));
                dj["M"] = to_json(estimate_box_dim(m_continuous, cloud_radii));
            }
            vj["dimension"] = dj;
        }

        if (wants("bounds")) {
            StageClock clock{report_.timing, tkey + "bounds"};
            Json bj;
            bj["theta"] = est.theta_hoelder;
            bj["gamma"] = est.gamma_hoelder;
            bj["N"] = n_nu;
            bj["beta"] = est.beta;
            bj["zeta"] = est.zeta;
            bj["tau"] = est.tau_absorb;
            if (have_dsigma) {
                bj["d_sigma_minus"] = dsigma_minus;
                bj["d_sigma_plus"] = dsigma_plus;
                const double ub = bound_uniform_attractor_dim(est.theta_hoelder, est.gamma_hoelder,
                                                              static_cast<double>(n_nu), est.beta, est.zeta,
                                                              est.tau_absorb, dsigma_minus, dsigma_plus);
                const double eb = bound_exp_attractor_dim(cfg_.nu, est.theta_hoelder, est.gamma_hoelder,
                                                          static_cast<double>(n_nu),
                                                          std::max(dsigma_minus, dsigma_plus), est.beta, est.zeta,
                                                          est.tau_absorb);
                bj["uniform_attractor"] = ub;
                bj["exp_attractor"] = eb;
                uniform_bounds_.push_back(ub);
                if (uniform_dim >= 0.0) {
                    bj["uniform_measured"] = uniform_dim;
                    check(prefix + "uniform_within_bound", uniform_dim <= ub + cfg_.margin,
                          "measured d_B <= bound + margin");
                }
            } else {
                bj["note"] = "asymptotic symbol sets unknown for this generator; bounds need d_sigma";
            }
            vj["bounds"] = bj;
        }
        if (wants("dimension")) hull_dims_.push_back(vj["dimension"]["hull"]["slope"].get<double>());

        if (wants("verify")) {
            StageClock clock{report_.timing, tkey + "verify"};
            verify(process, v, vj, prefix);
        }
        report_.data["variants"].push_back(vj);
    }

    void verify(const Process& process, const ForcingVariant& v, Json& vj, const std::string& prefix) {
        const std::size_t m = process.modes();
        const double h = process.h();
        std::mt19937_64 rng(cfg_.seed);
        StateVector u(m);
        for (std::size_t k = 0; k < m; ++k) u[k] = 2.0 * unit_uniform(rng) - 1.0;
        const double s = 3.0 * h, r = 40.0 * h, t = 100.0 * h;
        const double identity = distance_x(process.evolve(u, v.g, s, s), u);
        const double cocycle =
            distance_x(process.evolve(process.evolve(u, v.g, s, r), v.g, r, t), process.evolve(u, v.g, s, t));
        const double translation = verify_translation_property(process, u, v.g, 25.0 * h, s, t);
        const double scale = std::max(1.0, norm_x(u));
        Json j;
        j["identity_residual"] = identity;
        j["cocycle_residual"] = cocycle;
        j["translation_residual"] = translation;
        check(prefix + "process_axioms", std::max({identity, cocycle, translation}) <= cfg_.tol_axioms * scale,
              "identity, cocycle and translation residuals");

        const auto& f = process.config().nonlinearity;
        const bool no_forcing = cfg_.forcing.type == "zero";
        if (f.is_zero() && no_forcing) {
            const double lambda1 = process.config().disc.eigenvalue(0);
            const auto e1 = StateVector::basis(m, 1);
            const double got = norm_x(process.evolve(e1, v.g, 0.0, 1.0));
            const double want = std::exp(-lambda1);
            const double rel = std::abs(got - want) / want;
            j["decay"] = {{"measured", got}, {"expected", want}, {"relative_error", rel}};
            check(prefix + "linear_decay", rel <= cfg_.tol_decay, "|U(1,0) e1| against exp(-lambda_1)");
        }
        if (cfg_.declared_lip) {
            check(prefix + "declared_lipschitz", *cfg_.declared_lip >= f.lipschitz() - 1e-12,
                  "declared Lip_f covers the derived constant");
        }
        if (cfg_.declared_c0 || cfg_.declared_c1) {
            const double c0 = cfg_.declared_c0.value_or(f.c0());
            const double c1 = cfg_.declared_c1.value_or(f.c1());
            check(prefix + "declared_sign_condition", sign_condition_holds(f, c0, c1),
                  "u f(u) <= -C0 u^2 + C1 |u| on [-20, 20]");
        }
        vj["verify"] = j;
    }

    void cross_variant_checks(const std::vector<ForcingVariant>& variants) {
        if (variants.size() < 2) return;
        if (hull_dims_.size() == variants.size()) {
            bool increasing = true;
            for (std::size_t i = 1; i < hull_dims_.size(); ++i) increasing = increasing && hull_dims_[i] > hull_dims_[i - 1];
            check("hull_dimension_increasing", increasing, "hull d_B strictly increases with depth");
        }
        if (uniform_bounds_.size() == variants.size()) {
            bool constant = true;
            for (double b : uniform_bounds_) {
                constant = constant && std::abs(b - uniform_bounds_.front()) <= 1e-12 * std::abs(b);
            }
            check("bound_independent_of_depth", constant && std::isfinite(uniform_bounds_.front()),
                  "uniform-attractor bound with d_sigma = 0 is one finite number");
        }
    }

    const ExperimentConfig& cfg_;
    std::filesystem::path out_;
    std::set<std::string> stages_;
    RunReport report_;
    std::vector<double> hull_dims_;
    std::vector<double> uniform_bounds_;
};

}  // namespace

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const RunOverrides& ov) {
    if (ov.out) return *ov.out;
    if (!cfg.output.empty()) return cfg.output;
    if (const char* root = std::getenv("NDATTR_OUT"); root && *root) return std::filesystem::path(root) / cfg.scenario;
    return std::filesystem::path("out") / cfg.scenario;
}

RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    Runner runner(cfg, out_dir);
    auto report = runner.run();
    write_report(report, out_dir);
    return report;
}

RunReport run_experiment(const std::filesystem::path& config_path, const RunOverrides& ov) {
    auto cfg = load_experiment(config_path);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.tolerance) cfg.tol_pullback = *ov.tolerance;
    if (ov.stages) cfg.stages = *ov.stages;
    return run_experiment(cfg, resolve_output_dir(cfg, ov));
}

void write_report(const RunReport& report, const std::filesystem::path& out_dir) {
    write_text(out_dir / "report.json", report.data.dump(2) + "\n");
    write_text(out_dir / "timing.json", report.timing.dump(2) + "\n");
}

std::vector<std::filesystem::path> emit_plot_data(const RunReport& report, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    if (!report.data.contains("variants")) return written;
    for (const auto& v : report.data["variants"]) {
        const std::string tag = sanitize(v["label"].get<std::string>());
        if (v.contains("dimension")) {
            for (const auto& [name, d] : v["dimension"].items()) {
                std::vector<double> x, y;
                const auto radii = d["radii"].get<std::vector<double>>();
                const auto counts = d["counts"].get<std::vector<double>>();
                for (std::size_t i = 0; i < radii.size(); ++i) {
                    x.push_back(-std::log(radii[i]));
                    y.push_back(std::log(counts[i]));
                }
                const auto path = dir / (tag + "_dimension_" + name + ".csv");
                write_columns_csv({"neg_log_r", "log_N"}, {x, y}, path);
                written.push_back(path);
            }
        }
        if (v.contains("pullback") && v["pullback"].contains("semicontinuity")) {
            for (const auto& [side, fit] : v["pullback"]["semicontinuity"].items()) {
                const auto t = fit["times"].get<std::vector<double>>();
                const auto d = fit["distances"].get<std::vector<double>>();
                const double c = fit["c_bar"].get<double>();
                const double xi = fit["xi"].get<double>();
                std::vector<double> env;
                for (double ti : t) env.push_back(c * std::exp(-xi * ti));
                const auto path = dir / (tag + "_semicontinuity_" + side + ".csv");
                write_columns_csv({"t", "dist", "envelope"}, {t, d, env}, path);
                written.push_back(path);
            }
        }
        if (v.contains("expattractor")) {
            const auto& a = v["expattractor"]["attraction"];
            const auto levels = a["levels"].get<std::vector<double>>();
            const auto path = dir / (tag + "_attraction.csv");
            write_columns_csv({"n", "measured", "envelope"},
                              {levels, a["measured"].get<std::vector<double>>(),
                               a["envelope"].get<std::vector<double>>()},
                              path);
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace ndattr
