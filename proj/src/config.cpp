#include "ndattr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "ndattr/errors.hpp"
#include "ndattr/io.hpp"

namespace ndattr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InvalidArgument(where + ": expected a number, got '" + s + "'");
    }
    return v;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"", {"scenario", "seed", "output"}},
        {"discretization", {"modes", "length", "delta", "h", "quadrature_nodes"}},
        {"nonlinearity", {"type", "c", "a", "b", "saturation", "nodes", "values", "lip", "C0", "C1"}},
        {"forcing", {"type", "amplitude", "mode", "depth", "freqs", "amps", "t_min", "t_max", "step", "file"}},
        {"hull", {"extent", "resolution", "limit_extent", "limit_resolution", "symbols", "samples_per_unit", "n_max"}},
        {"absorb", {"radii", "taus", "probes"}},
        {"pullback", {"ensemble", "initial_lookback", "max_lookback", "span", "stride"}},
        {"dimension", {"hull_r0", "hull_ratio", "hull_count", "cloud_r0", "cloud_ratio", "cloud_count"}},
        {"expattractor", {"nu", "levels", "sample"}},
        {"pipeline", {"stages"}},
        {"tolerances", {"pullback", "limit_sets", "axioms", "decay", "margin"}},
    };
    return keys;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::string block;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw InvalidArgument(where + ": malformed block header");
            block = trim(line.substr(1, line.size() - 2));
            if (block.empty()) throw InvalidArgument(where + ": empty block name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InvalidArgument(where + ": empty key");
        auto& slot = cfg.blocks_[block];
        if (slot.count(key)) throw InvalidArgument(where + ": duplicate key '" + key + "'");
        slot[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InvalidArgument("config not found: " + path.string());
    return parse(read_text(path), path.string());
}

bool ConfigFile::has(const std::string& block, const std::string& key) const {
    auto b = blocks_.find(block);
    return b != blocks_.end() && b->second.count(key) > 0;
}

void ConfigFile::set(const std::string& block, const std::string& key, const std::string& value) {
    blocks_[block][key] = value;
}

std::string ConfigFile::get_string(const std::string& block, const std::string& key,
                                   const std::string& fallback) const {
    if (!has(block, key)) return fallback;
    return blocks_.at(block).at(key);
}

double ConfigFile::get_double(const std::string& block, const std::string& key, double fallback) const {
    if (!has(block, key)) return fallback;
    return to_double(blocks_.at(block).at(key), origin_ + " [" + block + "] " + key);
}

long ConfigFile::get_int(const std::string& block, const std::string& key, long fallback) const {
    const double v = get_double(block, key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw InvalidArgument(origin_ + " [" + block + "] " + key + ": expected an integer");
    return static_cast<long>(v);
}

std::vector<double> ConfigFile::get_doubles(const std::string& block, const std::string& key,
                                            std::vector<double> fallback) const {
    if (!has(block, key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(blocks_.at(block).at(key))) {
        out.push_back(to_double(item, origin_ + " [" + block + "] " + key));
    }
    return out;
}

std::vector<std::string> ConfigFile::get_strings(const std::string& block, const std::string& key,
                                                 std::vector<std::string> fallback) const {
    if (!has(block, key)) return fallback;
    return split_list(blocks_.at(block).at(key));
}

const std::vector<std::string>& known_stages() {
    static const std::vector<std::string> stages = {"hull",         "absorb",    "pullback", "uniform",
                                                    "expattractor", "dimension", "bounds",   "verify"};
    return stages;
}

ExperimentConfig parse_experiment(const ConfigFile& file) {
    const auto& allowed = allowed_keys();
    for (const auto& [block, entries] : file.blocks()) {
        auto a = allowed.find(block);
        if (a == allowed.end()) throw InvalidArgument("unknown config block [" + block + "]");
        for (const auto& [key, value] : entries) {
            if (!a->second.count(key)) {
                throw InvalidArgument("unknown key '" + key + "' in block [" + block + "]");
            }
        }
    }
    auto positive_size = [](long v, const char* name) {
        if (v < 1) throw InvalidArgument(std::string(name) + " must be >= 1");
        return static_cast<std::size_t>(v);
    };

    ExperimentConfig c;
    c.scenario = file.get_string("", "scenario", c.scenario);
    const long seed = file.get_int("", "seed", 0);
    if (seed < 0) throw InvalidArgument("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.output = file.get_string("", "output", "");

    const std::size_t modes = positive_size(file.get_int("discretization", "modes", 1), "modes");
    c.process.disc = SpatialDiscretization(modes, file.get_double("discretization", "length", 1.0),
                                           file.get_double("discretization", "delta", 0.25));
    c.process.h = file.get_double("discretization", "h", 1e-3);
    const long q = file.get_int("discretization", "quadrature_nodes", 0);
    if (q < 0) throw InvalidArgument("quadrature_nodes must be non-negative");
    c.process.quadrature_nodes = static_cast<std::size_t>(q);

    c.nonlinearity_type = file.get_string("nonlinearity", "type", "linear");
    if (c.nonlinearity_type == "linear") {
        c.process.nonlinearity = Nonlinearity::linear(file.get_double("nonlinearity", "c", 0.0));
    } else if (c.nonlinearity_type == "saturated_cubic") {
        c.process.nonlinearity = Nonlinearity::saturated_cubic(file.get_double("nonlinearity", "a", 1.0),
                                                               file.get_double("nonlinearity", "b", 1.0),
                                                               file.get_double("nonlinearity", "saturation", 1.0));
    } else if (c.nonlinearity_type == "tabulated") {
        c.process.nonlinearity = Nonlinearity::tabulated(file.get_doubles("nonlinearity", "nodes", {}),
                                                         file.get_doubles("nonlinearity", "values", {}));
    } else {
        throw InvalidArgument("unknown nonlinearity type '" + c.nonlinearity_type + "'");
    }
    if (file.has("nonlinearity", "lip")) c.declared_lip = file.get_double("nonlinearity", "lip", 0.0);
    if (file.has("nonlinearity", "C0")) c.declared_c0 = file.get_double("nonlinearity", "C0", 0.0);
    if (file.has("nonlinearity", "C1")) c.declared_c1 = file.get_double("nonlinearity", "C1", 0.0);

    auto& f = c.forcing;
    f.type = file.get_string("forcing", "type", "zero");
    static const std::set<std::string> generators = {"zero", "constant", "decay", "quasiperiodic", "cantor", "custom"};
    if (!generators.count(f.type)) throw InvalidArgument("unknown forcing generator '" + f.type + "'");
    f.amplitude = file.get_double("forcing", "amplitude", 1.0);
    f.mode = positive_size(file.get_int("forcing", "mode", 1), "forcing mode");
    if (f.mode > modes) throw InvalidArgument("forcing mode exceeds the mode count");
    f.depths.clear();
    for (double d : file.get_doubles("forcing", "depth", {4.0})) {
        if (d != std::floor(d) || d < 1.0) throw InvalidArgument("forcing depth must be a positive integer");
        f.depths.push_back(static_cast<int>(d));
    }
    f.freqs = file.get_doubles("forcing", "freqs", {});
    f.amps = file.get_doubles("forcing", "amps", {});
    f.t_min = file.get_double("forcing", "t_min", f.t_min);
    f.t_max = file.get_double("forcing", "t_max", f.t_max);
    f.step = file.get_double("forcing", "step", f.step);
    f.file = file.get_string("forcing", "file", "");
    if (f.type == "custom" && f.file.empty()) throw InvalidArgument("custom forcing needs a file");
    if (f.type == "quasiperiodic" && (f.freqs.empty() || f.freqs.size() != f.amps.size())) {
        throw InvalidArgument("quasiperiodic forcing needs matching freqs and amps");
    }

    c.hull_extent = file.get_double("hull", "extent", c.hull_extent);
    c.hull_resolution = file.get_double("hull", "resolution", c.hull_resolution);
    c.limit_extent = file.get_double("hull", "limit_extent", c.limit_extent);
    c.limit_resolution = file.get_double("hull", "limit_resolution", c.limit_resolution);
    c.symbol_sample = positive_size(file.get_int("hull", "symbols", 16), "hull symbols");
    c.metric.samples_per_unit = static_cast<int>(file.get_int("hull", "samples_per_unit", 0));
    c.metric.n_max = static_cast<int>(file.get_int("hull", "n_max", 40));
    if (c.metric.samples_per_unit < 0 || c.metric.n_max < 0) throw InvalidArgument("invalid Frechet settings");

    c.trial_radii = file.get_doubles("absorb", "radii", c.trial_radii);
    c.trial_taus = file.get_doubles("absorb", "taus", {});
    c.probes = static_cast<std::size_t>(std::max(0L, file.get_int("absorb", "probes", 8)));

    c.ensemble = positive_size(file.get_int("pullback", "ensemble", 8), "ensemble");
    c.initial_lookback = file.get_double("pullback", "initial_lookback", c.initial_lookback);
    c.max_lookback = file.get_double("pullback", "max_lookback", c.max_lookback);
    c.family_span = static_cast<int>(file.get_int("pullback", "span", 4));
    c.family_stride = static_cast<int>(file.get_int("pullback", "stride", 1));
    if (c.family_span < 1 || c.family_stride < 1) throw InvalidArgument("pullback: span and stride must be >= 1");

    c.hull_r0 = file.get_double("dimension", "hull_r0", c.hull_r0);
    c.hull_ratio = file.get_double("dimension", "hull_ratio", c.hull_ratio);
    c.hull_count = positive_size(file.get_int("dimension", "hull_count", 6), "hull_count");
    c.cloud_r0 = file.get_double("dimension", "cloud_r0", c.cloud_r0);
    c.cloud_ratio = file.get_double("dimension", "cloud_ratio", c.cloud_ratio);
    c.cloud_count = positive_size(file.get_int("dimension", "cloud_count", 6), "cloud_count");

    c.nu = file.get_double("expattractor", "nu", c.nu);
    c.levels = static_cast<int>(file.get_int("expattractor", "levels", 3));
    c.build_sample = positive_size(file.get_int("expattractor", "sample", 4), "expattractor sample");

    c.stages = file.get_strings("pipeline", "stages", {});
    for (const auto& s : c.stages) {
        if (std::find(known_stages().begin(), known_stages().end(), s) == known_stages().end()) {
            throw InvalidArgument("unknown pipeline stage '" + s + "'");
        }
    }

    c.tol_pullback = file.get_double("tolerances", "pullback", c.tol_pullback);
    c.tol_limit = file.get_double("tolerances", "limit_sets", c.tol_limit);
    c.tol_axioms = file.get_double("tolerances", "axioms", c.tol_axioms);
    c.tol_decay = file.get_double("tolerances", "decay", c.tol_decay);
    c.margin = file.get_double("tolerances", "margin", c.margin);
    return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    auto cfg = parse_experiment(ConfigFile::load(path));
    if (!cfg.forcing.file.empty() && std::filesystem::path(cfg.forcing.file).is_relative()) {
        cfg.forcing.file = (path.parent_path() / cfg.forcing.file).string();
    }
    return cfg;
}

std::vector<ForcingVariant> make_forcing_variants(const ExperimentConfig& cfg) {
    const auto& f = cfg.forcing;
    const auto& disc = cfg.process.disc;
    const std::size_t m = disc.modes();
    const StateVector unit = f.amplitude * StateVector::basis(m, f.mode);
    const SymbolPath zero = SymbolPath::zero(m);
    std::vector<ForcingVariant> out;
    if (f.type == "zero") {
        out.push_back({"zero", 0, zero, zero, zero, true});
    } else if (f.type == "constant") {
        const auto g = SymbolPath::constant(unit);
        out.push_back({"constant", 0, g, g, g, true});
    } else if (f.type == "decay") {
        if (!(f.t_max > f.t_min) || !(f.step > 0.0)) throw InvalidArgument("decay forcing: bad sampling grid");
        const auto n = static_cast<std::size_t>(std::llround((f.t_max - f.t_min) / f.step));
        std::vector<double> times;
        std::vector<StateVector> values;
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = f.t_min + static_cast<double>(i) * f.step;
            times.push_back(t);
            values.push_back(std::exp(-std::abs(t)) * unit);
        }
        out.push_back({"decay", 0, SymbolPath(std::move(times), values), zero, zero, true});
    } else if (f.type == "quasiperiodic") {
        std::vector<StateVector> amps;
        for (double a : f.amps) amps.push_back(a * StateVector::basis(m, f.mode));
        out.push_back({"quasiperiodic", 0, make_quasiperiodic(f.freqs, amps, f.t_min, f.t_max, f.step), {}, {},
                       false});
    } else if (f.type == "cantor") {
        for (int d : f.depths) {
            const auto base = y_ball_indicator_sampler(disc, d);
            const double amp = f.amplitude;
            auto g = make_cantor_forcing([&](std::size_t a) { return amp * base(a); }, d);
            out.push_back({"D=" + std::to_string(d), d, std::move(g), zero, zero, true});
        }
    } else if (f.type == "custom") {
        auto g = read_symbol_csv(f.file);
        if (g.modes() != m) throw InvalidArgument("custom forcing: mode count does not match the discretization");
        out.push_back({"custom", 0, std::move(g), {}, {}, false});
    }
    return out;
}

}  // namespace ndattr
