#include "lzs/run_config.hpp"

#include <fstream>
#include <set>

#include "lzs/errors.hpp"

namespace lzs {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ValidationError("config section '" + where + "' must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (allowed.count(key) == 0) {
            throw ValidationError("unknown config key '" + where + "." + key + "'");
        }
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config key '") + key + "': " + e.what());
    }
}

AxisRange axis_from_json(const json& j, AxisRange base, const std::string& where) {
    reject_unknown(j, {"min", "max", "count"}, where);
    base.min = get_or(j, "min", base.min);
    base.max = get_or(j, "max", base.max);
    const auto count = get_or<long long>(j, "count", static_cast<long long>(base.count));
    if (count < 1) {
        throw ValidationError(where + ".count must be at least 1");
    }
    base.count = static_cast<std::size_t>(count);
    return base;
}

json axis_to_json(const AxisRange& a) {
    return json{{"min", a.min}, {"max", a.max}, {"count", a.count}};
}

const char* method_name(StepMethod m) {
    return m == StepMethod::FixedRk4 ? "fixed-rk4" : "adaptive-dopri5";
}

// The reference experiments. All share l = 2 GHz/mPhi0 and phi_i = -5 mPhi0.
constexpr double kPresetSlope = 2.0;
constexpr double kPresetPhiI = -5.0;

GridSpec fig1b_grid() {
    return GridSpec{AxisRange{-2.0, 10.0, 240}, AxisRange{0.01, 4.0, 400}, kPresetPhiI};
}

GridSpec fig4_grid() {
    return GridSpec{AxisRange{-2.0, 16.0, 181}, AxisRange{0.01, 4.0, 400}, kPresetPhiI};
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1b", "fig4a", "fig4b", "fig4c"};
    return names;
}

RunConfig make_preset(const std::string& name) {
    RunConfig cfg;
    cfg.preset = name;
    cfg.outputs.name = name;
    if (name == "fig1b") {
        cfg.spectrum = QubitSpectrum::two_level(kPresetSlope, 2.0);
        cfg.grid = fig1b_grid();
    } else if (name == "fig4a") {
        cfg.spectrum = QubitSpectrum::three_level(kPresetSlope, 1.0, 10.0);
        cfg.grid = fig4_grid();
    } else if (name == "fig4b") {
        cfg.spectrum = QubitSpectrum::three_level(kPresetSlope, 2.0, 8.0);
        cfg.grid = fig4_grid();
    } else if (name == "fig4c") {
        cfg.spectrum = QubitSpectrum::three_level(kPresetSlope, 8.0, 2.0);
        cfg.grid = fig4_grid();
    } else {
        throw ValidationError("unknown preset '" + name + "' (expected fig1b, fig4a, fig4b or fig4c)");
    }
    return cfg;
}

json to_json(const QubitSpectrum& spectrum) {
    json crossings = json::array();
    for (const auto& a : spectrum.anticrossings()) {
        crossings.push_back({{"location", a.location}, {"gap", a.gap}, {"branch_slope", a.branch_slope}});
    }
    return json{{"left_slope", spectrum.left_slope()}, {"anticrossings", crossings}};
}

json to_json(const GridSpec& grid) {
    return json{{"phi_i", grid.phi_i}, {"phi_f", axis_to_json(grid.phi_f)}, {"tau", axis_to_json(grid.tau)}};
}

json to_json(const StepperConfig& s) {
    return json{{"method", method_name(s.method)},
                {"rel_tol", s.rel_tol},
                {"abs_tol", s.abs_tol},
                {"max_step", s.max_step},
                {"initial_step", s.initial_step},
                {"max_steps", s.max_steps}};
}

json to_json(const RunConfig& cfg) {
    json j{{"spectrum", to_json(cfg.spectrum)},
           {"grid", to_json(cfg.grid)},
           {"stepper", to_json(cfg.stepper)}};
    if (cfg.preset) {
        j["preset"] = *cfg.preset;
    }
    return j;
}

QubitSpectrum spectrum_from_json(const json& j) {
    reject_unknown(j, {"left_slope", "anticrossings"}, "spectrum");
    if (!j.contains("left_slope") || !j.contains("anticrossings")) {
        throw ValidationError("spectrum needs 'left_slope' and 'anticrossings'");
    }
    const double slope = get_or(j, "left_slope", 0.0);
    const json& list = j.at("anticrossings");
    if (!list.is_array()) {
        throw ValidationError("spectrum.anticrossings must be an array");
    }
    std::vector<Anticrossing> crossings;
    for (const auto& item : list) {
        reject_unknown(item, {"location", "gap", "branch_slope"}, "spectrum.anticrossings[]");
        if (!item.contains("location") || !item.contains("gap")) {
            throw ValidationError("each anticrossing needs 'location' and 'gap'");
        }
        crossings.push_back(Anticrossing{get_or(item, "location", 0.0), get_or(item, "gap", 0.0),
                                         get_or(item, "branch_slope", slope)});
    }
    return QubitSpectrum(slope, std::move(crossings));
}

GridSpec grid_from_json(const json& j, GridSpec base) {
    reject_unknown(j, {"phi_i", "phi_f", "tau"}, "grid");
    base.phi_i = get_or(j, "phi_i", base.phi_i);
    if (j.contains("phi_f")) {
        base.phi_f = axis_from_json(j.at("phi_f"), base.phi_f, "grid.phi_f");
    }
    if (j.contains("tau")) {
        base.tau = axis_from_json(j.at("tau"), base.tau, "grid.tau");
    }
    return base;
}

StepperConfig stepper_from_json(const json& j, StepperConfig base) {
    reject_unknown(j, {"method", "rel_tol", "abs_tol", "max_step", "initial_step", "max_steps"},
                   "stepper");
    if (j.contains("method")) {
        const auto m = get_or<std::string>(j, "method", "");
        if (m == "fixed-rk4") {
            base.method = StepMethod::FixedRk4;
        } else if (m == "adaptive-dopri5") {
            base.method = StepMethod::AdaptiveDopri5;
        } else {
            throw ValidationError("stepper.method must be 'fixed-rk4' or 'adaptive-dopri5'");
        }
    }
    base.rel_tol = get_or(j, "rel_tol", base.rel_tol);
    base.abs_tol = get_or(j, "abs_tol", base.abs_tol);
    base.max_step = get_or(j, "max_step", base.max_step);
    base.initial_step = get_or(j, "initial_step", base.initial_step);
    base.max_steps = get_or(j, "max_steps", base.max_steps);
    base.validate();
    return base;
}

RunConfig parse_config(const json& doc, RunConfig base) {
    reject_unknown(doc, {"preset", "spectrum", "grid", "stepper", "outputs"}, "<root>");
    RunConfig cfg = doc.contains("preset") ? make_preset(get_or<std::string>(doc, "preset", ""))
                                           : std::move(base);
    if (doc.contains("spectrum")) {
        cfg.spectrum = spectrum_from_json(doc.at("spectrum"));
    }
    if (doc.contains("grid")) {
        cfg.grid = grid_from_json(doc.at("grid"), cfg.grid);
    }
    if (doc.contains("stepper")) {
        cfg.stepper = stepper_from_json(doc.at("stepper"), cfg.stepper);
    }
    if (doc.contains("outputs")) {
        const json& o = doc.at("outputs");
        reject_unknown(o, {"dir", "name", "csv", "pgm"}, "outputs");
        cfg.outputs.dir = get_or(o, "dir", cfg.outputs.dir);
        cfg.outputs.name = get_or(o, "name", cfg.outputs.name);
        cfg.outputs.csv = get_or(o, "csv", cfg.outputs.csv);
        cfg.outputs.pgm = get_or(o, "pgm", cfg.outputs.pgm);
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path + "': " + e.what());
    }
    return parse_config(doc, std::move(base));
}

}  // namespace lzs
