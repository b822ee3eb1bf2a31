#pragma once

// Artifact formats.
//
// Map CSV (long format): '#' comment lines carrying the run configuration,
// then the header `phi_f_mPhi0,tau_ns,population` and one row per cell,
// ordered by phi_f then tau, every number printed with 9 significant digits.
//
// PGM: plain (P2) 16-bit grayscale, rows tau descending, columns phi_f
// ascending, value round(population * 65535).

#include <iosfwd>
#include <string>

#include "lzs/propagator.hpp"
#include "lzs/sweep.hpp"

namespace lzs {

inline constexpr const char* kMapCsvHeader = "phi_f_mPhi0,tau_ns,population";

/// %.9g formatting shared by every numeric artifact.
std::string format_number(double value);

/// JSON description of the map's spectrum, grid and stepper (no timestamp,
/// no worker count, so identical runs give identical bytes).
std::string map_metadata_json(const InterferenceMap& map);

void write_map_csv(std::ostream& out, const InterferenceMap& map);
void write_map_pgm(std::ostream& out, const InterferenceMap& map);

/// Parses a map CSV. Throws SchemaError naming the 1-based row/column on a
/// malformed file. Metadata comment lines are optional; without them the
/// returned grid has phi_i = NaN and default metadata.
InterferenceMap read_map_csv(std::istream& in);

InterferenceMap read_map_csv_file(const std::string& path);
void write_map_csv_file(const std::string& path, const InterferenceMap& map);
void write_map_pgm_file(const std::string& path, const InterferenceMap& map);

/// Trajectory CSV: t_ns, populations W11.., re_W12, im_W12, trace.
void write_trajectory_csv(std::ostream& out, const EvolutionResult& result,
                          const std::string& comment = {});

}  // namespace lzs
