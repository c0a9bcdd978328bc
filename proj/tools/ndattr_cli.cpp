// ndattr command line: run configured pipelines or single utilities.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndattr/harness.hpp"
#include "ndattr/io.hpp"

using namespace ndattr;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> tol;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "RNG seed (overrides the config)");
    app->add_option("--out", c.out, "Output directory (default $NDATTR_OUT/<scenario> or out/<scenario>)");
    app->add_option("--tol", c.tol, "Pullback convergence tolerance");
}

RunOverrides overrides(const Common& c) {
    RunOverrides ov;
    ov.seed = c.seed;
    if (c.out) ov.out = std::filesystem::path(*c.out);
    ov.tolerance = c.tol;
    return ov;
}

int report_and_exit(const RunReport& report, const std::filesystem::path& dir) {
    for (const auto& c : report.checks) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  " << c.detail << "\n";
    }
    if (!report.error.empty()) std::cerr << "error: " << report.error << "\n";
    std::cout << "report: " << (dir / "report.json").string() << "\n";
    return report.exit_code();
}

int run_stages(const std::string& config, const Common& common, std::optional<std::vector<std::string>> stages,
               bool plots) {
    auto cfg = load_experiment(config);
    auto ov = overrides(common);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.tolerance) cfg.tol_pullback = *ov.tolerance;
    if (stages) cfg.stages = *stages;
    const auto dir = resolve_output_dir(cfg, ov);
    const auto report = run_experiment(cfg, dir);
    if (plots) {
        for (const auto& p : emit_plot_data(report, dir / "plots")) std::cout << "plot: " << p.string() << "\n";
    }
    return report_and_exit(report, dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-autonomous attractor experiments on a spectral heat-type process"};
    app.require_subcommand(1);

    Common common;
    std::string config;
    bool plots = false;

    auto* run = app.add_subcommand("run", "Run every stage listed in a config");
    run->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    run->add_flag("--plots", plots, "Also write plot CSVs under <out>/plots");
    add_common(run, common);

    auto* attractor = app.add_subcommand("attractor", "Hull, absorbing set, pullback family and uniform attractor");
    attractor->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    add_common(attractor, common);

    auto* verify = app.add_subcommand("verify", "Process axioms, decay reference and declared constants");
    verify->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    add_common(verify, common);

    std::size_t variant = 0;
    double s = 0.0, t = 1.0;
    std::size_t stride = 1;
    std::vector<double> x0;
    auto* simulate = app.add_subcommand("simulate", "Integrate one trajectory and write it as CSV");
    simulate->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    simulate->add_option("--variant", variant, "Forcing variant index (Cantor depth order)");
    simulate->add_option("--from", s, "Start time");
    simulate->add_option("--to", t, "End time");
    simulate->add_option("--stride", stride, "Keep every stride-th step")->check(CLI::PositiveNumber);
    simulate->add_option("--x0", x0, "Initial coefficients (default zero)")->delimiter(',');
    add_common(simulate, common);

    std::string cloud;
    double r0 = 0.1, ratio = 0.5;
    std::size_t count = 6;
    auto* dimension = app.add_subcommand("dimension", "Box-counting dimension of a point-cloud CSV");
    dimension->add_option("cloud", cloud, "CSV with header k1..km")->required()->check(CLI::ExistingFile);
    dimension->add_option("--r0", r0, "Largest radius");
    dimension->add_option("--ratio", ratio, "Geometric radius ratio in (0,1)");
    dimension->add_option("--count", count, "Number of radii");

    std::string kind = "uniform";
    double theta = 1.0, gamma = 1.0, n_cover = 2.0, beta = 0.0, zeta = 0.6931471805599453, tau = 1.0;
    double ds_minus = 0.0, ds_plus = 0.0, nu = 0.5, r_poly = 1.0, d_plus = 0.0, d_minus = 0.0;
    auto* bounds = app.add_subcommand("bounds", "Evaluate a dimension bound");
    bounds->add_option("--kind", kind, "uniform | exp | union-exp | union-poly")
        ->check(CLI::IsMember({"uniform", "exp", "union-exp", "union-poly"}));
    bounds->add_option("--theta", theta);
    bounds->add_option("--gamma", gamma);
    bounds->add_option("--N", n_cover, "Covering number");
    bounds->add_option("--beta", beta);
    bounds->add_option("--zeta", zeta);
    bounds->add_option("--tau", tau);
    bounds->add_option("--dsigma-minus", ds_minus);
    bounds->add_option("--dsigma-plus", ds_plus);
    bounds->add_option("--nu", nu);
    bounds->add_option("--r", r_poly, "Polynomial decay exponent");
    bounds->add_option("--d-plus", d_plus);
    bounds->add_option("--d-minus", d_minus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorCode::Config);
    }

    try {
        if (*run) return run_stages(config, common, std::nullopt, plots);
        if (*attractor) return run_stages(config, common, std::vector<std::string>{"hull", "absorb", "pullback", "uniform"}, false);
        if (*verify) return run_stages(config, common, std::vector<std::string>{"verify"}, false);

        if (*simulate) {
            auto cfg = load_experiment(config);
            const Process process(cfg.process);
            const auto variants = make_forcing_variants(cfg);
            if (variant >= variants.size()) throw InvalidArgument("variant index out of range");
            StateVector u(process.modes());
            if (!x0.empty()) {
                if (x0.size() != process.modes()) throw InvalidArgument("--x0 needs one value per mode");
                for (std::size_t k = 0; k < x0.size(); ++k) u[k] = x0[k];
            }
            const auto samples = process.trajectory(u, variants[variant].g, s, t, stride);
            const auto dir = resolve_output_dir(cfg, overrides(common));
            const auto path = dir / "trajectory.csv";
            write_trajectory_csv(samples, path);
            std::cout << "final |x| = " << format_double(norm_x(samples.back().u)) << "\n";
            std::cout << "trajectory: " << path.string() << "\n";
            return 0;
        }

        if (*dimension) {
            const auto k = read_cloud_csv(cloud);
            const auto radii = geometric_radii(r0, ratio, count);
            std::cout << to_json(estimate_box_dim(k, radii)).dump(2) << "\n";
            return 0;
        }

        if (*bounds) {
            double value = 0.0;
            if (kind == "uniform") {
                value = bound_uniform_attractor_dim(theta, gamma, n_cover, beta, zeta, tau, ds_minus, ds_plus);
            } else if (kind == "exp") {
                value = bound_exp_attractor_dim(nu, theta, gamma, n_cover, std::max(ds_minus, ds_plus), beta, zeta, tau);
            } else {
                const auto model = kind == "union-exp" ? DecayModel::Exponential : DecayModel::Polynomial;
                value = bound_union_pullback(d_plus, d_minus, model, r_poly, theta, gamma, n_cover);
            }
            std::cout << format_double(value) << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorCode::Config);
    }
    return 0;
}
