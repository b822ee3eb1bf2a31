#include "lzs/report.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "lzs/errors.hpp"
#include "lzs/io.hpp"

namespace lzs {

namespace {

double parse_double(const std::string& text, std::size_t line) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw SchemaError("not a number: '" + text + "'", line, 2);
}

}  // namespace

void write_fit_report_text(std::ostream& out, const SpectroscopyFit& fit) {
    out << "LZS spectroscopy fit\n";
    out << "  slope l            " << format_number(fit.slope_estimate) << " rad/ns per mPhi0\n";
    out << "  reference location " << format_number(fit.reference_location) << " mPhi0\n";
    out << "  anticrossings     ";
    if (fit.anticrossing_locations.empty()) out << " none";
    for (double x : fit.anticrossing_locations) out << ' ' << format_number(x);
    out << " mPhi0\n";
    for (const auto& g : fit.gap_estimates)
        out << "  gap at " << format_number(g.location) << " mPhi0: " << format_number(g.gap)
            << " rad/ns\n";
    out << "  k12                " << format_number(fit.k12) << " mPhi0/ns\n";
    out << "  k13                " << format_number(fit.k13) << " mPhi0/ns\n";
    for (const auto& [name, value] : fit.residuals)
        out << "  " << name << ": " << format_number(value) << '\n';
    for (const auto& note : fit.notes) out << "  note: " << note << '\n';
}

void write_fit_report_kv(std::ostream& out, const SpectroscopyFit& fit) {
    out << "slope_estimate=" << format_number(fit.slope_estimate) << '\n';
    out << "reference_location=" << format_number(fit.reference_location) << '\n';
    for (double x : fit.anticrossing_locations)
        out << "anticrossing_locations[]=" << format_number(x) << '\n';
    for (const auto& g : fit.gap_estimates)
        out << "gap_estimates[]=" << format_number(g.location) << ',' << format_number(g.gap) << '\n';
    out << "k12=" << format_number(fit.k12) << '\n';
    out << "k13=" << format_number(fit.k13) << '\n';
    for (const auto& [name, value] : fit.residuals)
        out << "residuals." << name << '=' << format_number(value) << '\n';
    for (const auto& note : fit.notes) out << "note[]=" << note << '\n';
}

SpectroscopyFit read_fit_report_kv(std::istream& in) {
    SpectroscopyFit fit;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError("expected key=value", row, 1);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "slope_estimate") {
            fit.slope_estimate = parse_double(value, row);
        } else if (key == "reference_location") {
            fit.reference_location = parse_double(value, row);
        } else if (key == "anticrossing_locations[]") {
            fit.anticrossing_locations.push_back(parse_double(value, row));
        } else if (key == "gap_estimates[]") {
            const auto comma = value.find(',');
            if (comma == std::string::npos) throw SchemaError("expected location,gap", row, 2);
            fit.gap_estimates.push_back(
                {parse_double(value.substr(0, comma), row), parse_double(value.substr(comma + 1), row)});
        } else if (key == "k12") {
            fit.k12 = parse_double(value, row);
        } else if (key == "k13") {
            fit.k13 = parse_double(value, row);
        } else if (key.rfind("residuals.", 0) == 0) {
            fit.residuals.emplace_back(key.substr(10), parse_double(value, row));
        } else if (key == "note[]") {
            fit.notes.push_back(value);
        } else {
            throw SchemaError("unknown key '" + key + "'", row, 1);
        }
    }
    return fit;
}

}  // namespace lzs
