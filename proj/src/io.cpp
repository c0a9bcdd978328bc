#include "ndattr/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ndattr/errors.hpp"

namespace ndattr {

std::string format_double(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw InvalidArgument("malformed number '" + s + "' in " + path.string());
    return v;
}

std::vector<std::vector<double>> read_numeric_rows(const std::filesystem::path& path, std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty file " + path.string());
    header = split_csv(line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) throw InvalidArgument("ragged row in " + path.string());
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double(c, path));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write " + path.string());
    return os;
}

void write_mode_header(std::ostream& os, std::size_t modes, bool with_time) {
    if (with_time) os << 't';
    for (std::size_t k = 1; k <= modes; ++k) {
        if (with_time || k > 1) os << ',';
        os << 'k' << k;
    }
    os << '\n';
}

}  // namespace

void write_cloud_csv(const PointCloud& cloud, std::ostream& os) {
    const std::size_t m = cloud.empty() ? 0 : cloud.modes();
    write_mode_header(os, m, false);
    for (const auto& p : cloud.elements) {
        for (std::size_t k = 0; k < m; ++k) {
            if (k) os << ',';
            os << format_double(p[k]);
        }
        os << '\n';
    }
}

void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_cloud_csv(cloud, os);
}

PointCloud read_cloud_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto rows = read_numeric_rows(path, header);
    PointCloud out;
    out.label = path.stem().string();
    for (auto& r : rows) out.elements.emplace_back(std::move(r));
    return out;
}

void write_symbol_csv(const SymbolPath& p, const std::filesystem::path& path) {
    auto os = open_out(path);
    write_mode_header(os, p.modes(), true);
    const auto times = p.stored_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_double(times[i] - p.offset());
        const StateVector v = p.stored_value(i);
        for (std::size_t k = 0; k < v.modes(); ++k) os << ',' << format_double(v[k]);
        os << '\n';
    }
}

SymbolPath read_symbol_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_numeric_rows(path, header);
    if (header.size() < 2 || header[0] != "t") throw InvalidArgument("symbol CSV needs header t,k1..km");
    std::vector<double> times;
    std::vector<StateVector> values;
    for (const auto& r : rows) {
        times.push_back(r[0]);
        values.emplace_back(std::vector<double>(r.begin() + 1, r.end()));
    }
    return SymbolPath(std::move(times), values);
}

void write_trajectory_csv(std::span<const Process::Sample> samples, const std::filesystem::path& path) {
    auto os = open_out(path);
    const std::size_t m = samples.empty() ? 0 : samples.front().u.modes();
    write_mode_header(os, m, true);
    for (const auto& s : samples) {
        os << format_double(s.t);
        for (std::size_t k = 0; k < m; ++k) os << ',' << format_double(s.u[k]);
        os << '\n';
    }
}

void write_columns_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns,
                       const std::filesystem::path& path) {
    if (header.size() != columns.size()) throw InvalidArgument("write_columns_csv: header/column mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != rows) throw InvalidArgument("write_columns_csv: ragged columns");
    }
    auto os = open_out(path);
    for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << format_double(columns[j][i]);
        os << '\n';
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path);
    os << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ndattr
