#pragma once

// Experiment configuration: key = value lines, '#' comments, and one level
// of [block] sections.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ndattr/dynamics.hpp"
#include "ndattr/symbol_space.hpp"

namespace ndattr {

/// Raw parsed file. Top-level keys live in the "" block.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigFile load(const std::filesystem::path& path);

    [[nodiscard]] bool has(const std::string& block, const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& block, const std::string& key,
                                         const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& block, const std::string& key, double fallback) const;
    [[nodiscard]] long get_int(const std::string& block, const std::string& key, long fallback) const;
    [[nodiscard]] std::vector<double> get_doubles(const std::string& block, const std::string& key,
                                                  std::vector<double> fallback) const;
    [[nodiscard]] std::vector<std::string> get_strings(const std::string& block, const std::string& key,
                                                       std::vector<std::string> fallback) const;

    [[nodiscard]] const std::map<std::string, std::map<std::string, std::string>>& blocks() const { return blocks_; }
    void set(const std::string& block, const std::string& key, const std::string& value);

private:
    std::map<std::string, std::map<std::string, std::string>> blocks_;
    std::string origin_;
};

struct ForcingSpec {
    std::string type = "zero";  // zero | constant | decay | quasiperiodic | cantor | custom
    double amplitude = 1.0;
    std::size_t mode = 1;
    std::vector<int> depths{4};
    std::vector<double> freqs;
    std::vector<double> amps;
    double t_min = -64.0, t_max = 64.0, step = 0.0625;
    std::string file;
};

struct ExperimentConfig {
    std::string scenario = "unnamed";
    std::uint64_t seed = 0;
    std::string output;

    ProcessConfig process;
    std::string nonlinearity_type = "linear";
    std::optional<double> declared_lip, declared_c0, declared_c1;

    ForcingSpec forcing;

    // hull
    double hull_extent = 2.0;
    double hull_resolution = 0.002;
    double limit_extent = 64.0;
    double limit_resolution = 1.0;
    std::size_t symbol_sample = 16;
    FrechetConfig metric{40, 0};

    // absorb
    std::vector<double> trial_radii{0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<double> trial_taus;
    std::size_t probes = 8;

    // pullback
    std::size_t ensemble = 8;
    double initial_lookback = 1.0;
    double max_lookback = 1024.0;
    int family_span = 4;    // times i stride tau for |i| <= span
    int family_stride = 1;

    // dimension
    double hull_r0 = 0.3, hull_ratio = 0.6;
    std::size_t hull_count = 6;
    double cloud_r0 = 0.1, cloud_ratio = 0.5;
    std::size_t cloud_count = 6;

    // expattractor
    double nu = 0.5;
    int levels = 3;
    std::size_t build_sample = 4;

    std::vector<std::string> stages;

    // tolerances
    double tol_pullback = 1e-6;
    double tol_limit = 1e-6;
    double tol_axioms = 1e-12;
    double tol_decay = 0.01;
    double margin = 0.5;
};

/// Validates keys and values; throws InvalidArgument on unknown keys,
/// unknown generators or stages, and malformed numbers.
[[nodiscard]] ExperimentConfig parse_experiment(const ConfigFile& file);
[[nodiscard]] ExperimentConfig load_experiment(const std::filesystem::path& path);

/// One forcing path per variant (one per Cantor depth, otherwise one).
struct ForcingVariant {
    std::string label;
    int depth = 0;
    SymbolPath g;
    SymbolPath g_plus, g_minus;  // asymptotic symbols when known
    bool has_limits = false;
};

[[nodiscard]] std::vector<ForcingVariant> make_forcing_variants(const ExperimentConfig& cfg);

/// The pipeline stages in execution order.
[[nodiscard]] const std::vector<std::string>& known_stages();

}  // namespace ndattr
