#include "lzs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>

#include "lzs/errors.hpp"
#include "lzs/run_config.hpp"

namespace lzs {

namespace {

constexpr std::string_view kConfigPrefix = "# config: ";

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_field(const std::string& field, std::size_t row, std::size_t column) {
    const std::string text = trim(field);
    if (text.empty()) {
        throw SchemaError("empty value at row " + std::to_string(row) + ", column " +
                              std::to_string(column),
                          row, column);
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size()) {
        throw SchemaError("non-numeric value '" + text + "' at row " + std::to_string(row) +
                              ", column " + std::to_string(column),
                          row, column);
    }
    return value;
}

// Rebuilds a uniform axis from the distinct values seen in the file.
AxisRange axis_from_values(const std::vector<double>& sorted, const char* name) {
    AxisRange axis{sorted.front(), sorted.back(), sorted.size()};
    const double scale = std::max({1.0, std::abs(axis.min), std::abs(axis.max)});
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (std::abs(axis.at(i) - sorted[i]) > 1e-7 * scale) {
            throw SchemaError(std::string("non-uniform ") + name + " axis in map CSV", 0, 0);
        }
    }
    return axis;
}

void write_comment_header(std::ostream& out, const InterferenceMap& map) {
    out << "# lzs interference map: final |L0> population\n";
    out << kConfigPrefix << map_metadata_json(map) << '\n';
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string map_metadata_json(const InterferenceMap& map) {
    nlohmann::json j{{"spectrum", to_json(map.metadata.spectrum)},
                     {"grid", to_json(map.grid)},
                     {"stepper", to_json(map.metadata.stepper)}};
    return j.dump();
}

void write_map_csv(std::ostream& out, const InterferenceMap& map) {
    write_comment_header(out, map);
    out << kMapCsvHeader << '\n';
    const GridSpec& g = map.grid;
    for (std::size_t j = 0; j < g.phi_f.count; ++j) {
        const std::string phi_f = format_number(g.phi_f.at(j));
        for (std::size_t i = 0; i < g.tau.count; ++i) {
            out << phi_f << ',' << format_number(g.tau.at(i)) << ',' << format_number(map.at(i, j))
                << '\n';
        }
    }
}

void write_map_pgm(std::ostream& out, const InterferenceMap& map) {
    const GridSpec& g = map.grid;
    out << "P2\n";
    out << "# lzs interference map: rows tau descending, columns phi_f ascending\n";
    out << "# config: " << map_metadata_json(map) << '\n';
    out << g.phi_f.count << ' ' << g.tau.count << '\n' << 65535 << '\n';
    for (std::size_t r = 0; r < g.tau.count; ++r) {
        const std::size_t i = g.tau.count - 1 - r;
        for (std::size_t j = 0; j < g.phi_f.count; ++j) {
            const double v = std::clamp(map.at(i, j), 0.0, 1.0);
            out << static_cast<long>(std::lround(v * 65535.0));
            out << (j + 1 == g.phi_f.count ? '\n' : ' ');
        }
    }
}

InterferenceMap read_map_csv(std::istream& in) {
    InterferenceMap map;
    map.grid.phi_i = std::numeric_limits<double>::quiet_NaN();
    bool have_metadata = false;
    bool have_header = false;

    std::map<double, std::map<double, double>> cells;  // phi_f -> tau -> population
    std::vector<double> taus;
    std::string line;
    std::size_t row = 0;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (line.rfind(kConfigPrefix, 0) == 0) {
                try {
                    const auto j = nlohmann::json::parse(line.substr(kConfigPrefix.size()));
                    map.metadata.spectrum = spectrum_from_json(j.at("spectrum"));
                    map.metadata.stepper = stepper_from_json(j.at("stepper"));
                    map.grid.phi_i = j.at("grid").at("phi_i").get<double>();
                    have_metadata = true;
                } catch (const std::exception& e) {
                    throw SchemaError("bad config comment at row " + std::to_string(row) + ": " +
                                          e.what(),
                                      row, 0);
                }
            }
            continue;
        }
        if (!have_header) {
            if (trim(line) != kMapCsvHeader) {
                throw SchemaError("expected header '" + std::string(kMapCsvHeader) + "' at row " +
                                      std::to_string(row),
                                  row, 0);
            }
            have_header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        if (fields.size() != 3) {
            throw SchemaError("expected 3 columns at row " + std::to_string(row) + ", found " +
                                  std::to_string(fields.size()),
                              row, std::min<std::size_t>(fields.size() + 1, 4));
        }
        const double phi_f = parse_field(fields[0], row, 1);
        const double tau = parse_field(fields[1], row, 2);
        const double pop = parse_field(fields[2], row, 3);
        auto& column = cells[phi_f];
        if (!column.emplace(tau, pop).second) {
            throw SchemaError("duplicate cell at row " + std::to_string(row), row, 0);
        }
        taus.push_back(tau);
        ++n_rows;
    }
    if (!have_header) {
        throw SchemaError("missing header line", 0, 0);
    }
    if (n_rows == 0) {
        throw SchemaError("map CSV has no data rows", 0, 0);
    }

    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    std::vector<double> phis;
    for (const auto& [phi_f, column] : cells) {
        phis.push_back(phi_f);
        if (column.size() != taus.size()) {
            throw SchemaError("incomplete grid: column phi_f = " + format_number(phi_f) + " has " +
                                  std::to_string(column.size()) + " of " +
                                  std::to_string(taus.size()) + " tau values",
                              0, 0);
        }
    }
    map.grid.phi_f = axis_from_values(phis, "phi_f");
    map.grid.tau = axis_from_values(taus, "tau");
    map.values.assign(map.grid.cell_count(), 0.0);
    std::size_t j = 0;
    for (const auto& [phi_f, column] : cells) {
        std::size_t i = 0;
        for (const auto& [tau, pop] : column) {
            if (tau != taus[i]) {
                throw SchemaError("incomplete grid at phi_f = " + format_number(phi_f), 0, 0);
            }
            map.at(i, j) = pop;
            ++i;
        }
        ++j;
    }
    if (!have_metadata) {
        map.metadata.timestamp.clear();
    }
    return map;
}

InterferenceMap read_map_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open map file '" + path + "'");
    }
    return read_map_csv(in);
}

void write_map_csv_file(const std::string& path, const InterferenceMap& map) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    write_map_csv(out, map);
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

void write_map_pgm_file(const std::string& path, const InterferenceMap& map) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    write_map_pgm(out, map);
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

void write_trajectory_csv(std::ostream& out, const EvolutionResult& result,
                          const std::string& comment) {
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    const int n = static_cast<int>(result.final_state.rows());
    out << "t_ns";
    for (int i = 1; i <= n; ++i) {
        out << ",W" << i << i;
    }
    out << ",re_W12,im_W12,trace\n";
    for (const auto& sample : result.trajectory) {
        out << format_number(sample.t);
        for (int i = 0; i < n; ++i) {
            out << ',' << format_number(sample.rho(i, i).real());
        }
        out << ',' << format_number(sample.rho(0, 1).real()) << ','
            << format_number(sample.rho(0, 1).imag()) << ','
            << format_number(sample.rho.trace().real()) << '\n';
    }
}

}  // namespace lzs
