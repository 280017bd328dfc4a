#ifndef NCL_HARNESS_IO_HPP
#define NCL_HARNESS_IO_HPP

/** @file
 * CSV and manifest I/O for trials, features, models and result tables.
 */

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ncl/chaosfex.hpp"
#include "ncl/chaosnet.hpp"
#include "ncl/dynamics.hpp"
#include "ncl/error.hpp"

namespace ncl {

namespace fs = std::filesystem;

/// A CSV file held as strings: one header row plus data rows.
struct csv_table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw io_error("csv: missing column '" + std::string(name) + "'");
    }

    friend bool operator==(const csv_table&, const csv_table&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace detail

inline double parse_double(const std::string& s, const std::string& context = "csv") {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw io_error(context + ": not a number: '" + s + "'");
    return v;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline csv_table read_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path.string());
    csv_table t;
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty() || line.front() == '#') continue;
        auto cells = detail::split_csv_line(line);
        if (header) {
            t.columns = std::move(cells);
            header = false;
            continue;
        }
        if (cells.size() != t.columns.size())
            throw io_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(t.columns.size()) + " fields, got " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (header) throw io_error(path.string() + ": empty file");
    return t;
}

inline void write_csv(const fs::path& path, const csv_table& t) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path.string());
    auto emit = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    emit(t.columns);
    for (const auto& r : t.rows) emit(r);
    if (!os) throw io_error("write failed for " + path.string());
}

inline std::vector<double> numeric_column(const csv_table& t, std::string_view name, const std::string& context) {
    const auto c = t.column(name);
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) out.push_back(parse_double(r[c], context));
    return out;
}

// --- trials ---------------------------------------------------------------

inline void write_pair_csv(const fs::path& path, const time_series_pair& p) {
    csv_table t{{"index", "master", "slave"}, {}};
    for (std::size_t i = 0; i < p.master.size(); ++i)
        t.rows.push_back({std::to_string(i), format_double(p.master[i]), format_double(p.slave[i])});
    write_csv(path, t);
}

inline time_series_pair read_pair_csv(const fs::path& path) {
    const auto t = read_csv(path);
    time_series_pair p;
    p.master = numeric_column(t, "master", path.string());
    p.slave = numeric_column(t, "slave", path.string());
    p.tag = path.filename().string();
    return p;
}

/// trial_0000.csv, trial_0001.csv, ... sorted by name.
inline std::vector<fs::path> list_trial_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw io_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("trial_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw io_error("no trial_*.csv files in " + dir.string());
    return files;
}

inline std::string trial_file_name(std::size_t i) {
    std::ostringstream os;
    os << "trial_" << std::setw(4) << std::setfill('0') << i << ".csv";
    return os.str();
}

// --- features -------------------------------------------------------------

inline void write_features_csv(const fs::path& path, const feature_matrix& f) {
    csv_table t{{"idx", "firing_time", "firing_rate", "energy", "entropy"}, {}};
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        const auto& r = f.rows[i];
        t.rows.push_back({std::to_string(i), format_double(r.firing_time), format_double(r.firing_rate),
                          format_double(r.energy), format_double(r.entropy)});
    }
    write_csv(path, t);
}

inline feature_matrix read_features_csv(const fs::path& path) {
    const auto t = read_csv(path);
    const auto n = numeric_column(t, "firing_time", path.string());
    const auto r = numeric_column(t, "firing_rate", path.string());
    const auto e = numeric_column(t, "energy", path.string());
    const auto h = numeric_column(t, "entropy", path.string());
    feature_matrix f;
    for (std::size_t i = 0; i < n.size(); ++i) f.rows.push_back({n[i], r[i], e[i], h[i]});
    return f;
}

// --- manifests ------------------------------------------------------------

inline fs::path manifest_path_for(const fs::path& output) {
    return fs::path(output.string() + ".manifest.json");
}

inline void write_manifest(const fs::path& path, const nlohmann::json& manifest) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path.string());
    os << manifest.dump(2) << '\n';
}

inline nlohmann::json read_manifest(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(path.string() + ": " + e.what());
    }
}

inline nlohmann::json to_json(const neurochaos_config& c) {
    return {{"q", c.q}, {"b", c.b}, {"epsilon", c.epsilon}, {"max_iter", c.max_iter}};
}

inline neurochaos_config neurochaos_from_json(const nlohmann::json& j) {
    neurochaos_config c;
    c.q = j.value("q", c.q);
    c.b = j.value("b", c.b);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.max_iter = j.value("max_iter", c.max_iter);
    return c;
}

// --- ChaosNet model -------------------------------------------------------

/// Text format: a '#'-prefixed key=value header line followed by a CSV of
/// `label,v0,v1,...` rows, one per class prototype.
inline void save_chaosnet(const fs::path& path, const chaosnet_model& m) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path.string());
    os << "# q=" << format_double(m.config.q) << " b=" << format_double(m.config.b)
       << " epsilon=" << format_double(m.config.epsilon) << " max_iter=" << m.config.max_iter
       << " normalization=" << (m.norm.mode == normalization_mode::per_instance ? "per_instance" : "training_range")
       << " lo=" << format_double(m.norm.lo) << " hi=" << format_double(m.norm.hi) << '\n';
    for (const auto& p : m.prototypes) {
        os << p.label;
        for (double v : p.mean_vector) os << ',' << format_double(v);
        os << '\n';
    }
    if (!os) throw io_error("write failed for " + path.string());
}

inline chaosnet_model load_chaosnet(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw io_error(path.string() + ": missing model header");
    chaosnet_model m;
    std::istringstream header(line.substr(2));
    std::string kv;
    while (header >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw io_error(path.string() + ": bad header field '" + kv + "'");
        const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "q") m.config.q = parse_double(val, path.string());
        else if (key == "b") m.config.b = parse_double(val, path.string());
        else if (key == "epsilon") m.config.epsilon = parse_double(val, path.string());
        else if (key == "max_iter") m.config.max_iter = static_cast<std::size_t>(parse_double(val, path.string()));
        else if (key == "normalization")
            m.norm.mode = val == "per_instance" ? normalization_mode::per_instance : normalization_mode::training_range;
        else if (key == "lo") m.norm.lo = parse_double(val, path.string());
        else if (key == "hi") m.norm.hi = parse_double(val, path.string());
    }
    while (std::getline(is, line)) {
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        class_prototype p;
        p.label = static_cast<int>(parse_double(cells.front(), path.string()));
        for (std::size_t i = 1; i < cells.size(); ++i) p.mean_vector.push_back(parse_double(cells[i], path.string()));
        m.prototypes.push_back(std::move(p));
    }
    if (m.prototypes.size() < 2) throw io_error(path.string() + ": model needs at least two prototypes");
    for (const auto& p : m.prototypes)
        if (p.mean_vector.size() != m.prototypes.front().mean_vector.size())
            throw io_error(path.string() + ": prototypes differ in dimension");
    validate(m.config);
    return m;
}

} // namespace ncl

#endif // NCL_HARNESS_IO_HPP
