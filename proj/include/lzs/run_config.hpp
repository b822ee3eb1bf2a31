#pragma once

// Run configuration: a JSON document with flat sections mirroring the
// domain types, plus the named presets for the reference experiments.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lzs/propagator.hpp"
#include "lzs/qubit_model.hpp"
#include "lzs/sweep.hpp"

namespace lzs {

struct OutputSpec {
    std::string dir = ".";
    std::string name = "map";
    bool csv = true;
    bool pgm = false;
};

struct RunConfig {
    std::optional<std::string> preset;
    QubitSpectrum spectrum = QubitSpectrum::two_level(2.0, 2.0);
    GridSpec grid{AxisRange{-2.0, 10.0, 240}, AxisRange{0.01, 4.0, 400}, -5.0};
    StepperConfig stepper;
    OutputSpec outputs;
};

/// fig1b, fig4a, fig4b, fig4c
const std::vector<std::string>& preset_names();

/// Throws ValidationError for an unknown name.
RunConfig make_preset(const std::string& name);

/// Applies a JSON document on top of `base` (or on top of its "preset" entry
/// when present). Unknown keys are rejected. Throws ValidationError.
RunConfig parse_config(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

nlohmann::json to_json(const QubitSpectrum& spectrum);
nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const StepperConfig& stepper);
/// Reproducibility record: everything that determines the numbers.
nlohmann::json to_json(const RunConfig& config);

QubitSpectrum spectrum_from_json(const nlohmann::json& j);
GridSpec grid_from_json(const nlohmann::json& j, GridSpec base = {});
StepperConfig stepper_from_json(const nlohmann::json& j, StepperConfig base = {});

}  // namespace lzs
