#pragma once

// Plain-text artifact formats. CSV numbers use 17 significant digits so
// every double round-trips; files are UTF-8 with LF line endings.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ndattr/dynamics.hpp"
#include "ndattr/state_space.hpp"
#include "ndattr/symbol_space.hpp"

namespace ndattr {

[[nodiscard]] std::string format_double(double v);

/// Header k1..km, one point per row.
void write_cloud_csv(const PointCloud& cloud, std::ostream& os);
void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path);
[[nodiscard]] PointCloud read_cloud_csv(const std::filesystem::path& path);

/// Header t,k1..km at the stored sample times of the path's own clock.
void write_symbol_csv(const SymbolPath& p, const std::filesystem::path& path);
[[nodiscard]] SymbolPath read_symbol_csv(const std::filesystem::path& path);

void write_trajectory_csv(std::span<const Process::Sample> samples, const std::filesystem::path& path);

/// Two or more named numeric columns.
void write_columns_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns,
                       const std::filesystem::path& path);

/// Writes text with LF endings, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

}  // namespace ndattr
