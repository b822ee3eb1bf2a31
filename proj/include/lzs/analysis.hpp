#pragma once

// Inverse problem: recover spectrum parameters from an interference map.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lzs/sweep.hpp"

namespace lzs {

enum class FftWindow { Flat, Hann };

struct ColumnSpectrum {
    double phi_f = 0.0;           ///< mPhi0
    double dominant_omega = 0.0;  ///< rad/ns, 2 pi / T
    double power = 0.0;           ///< |X_peak|^2 / N^2 of the mean-subtracted column
    double resolution = 0.0;      ///< 2 pi / (tau span), rad/ns
};

/// Mean-subtracted DFT of a uniformly sampled column; the peak bin is
/// refined by 3-point parabolic interpolation on the magnitude. Needs at
/// least 16 samples (DomainError) on a uniform tau grid (ValidationError).
ColumnSpectrum column_fft(std::span<const ColumnSample> column, double phi_f,
                          FftWindow window = FftWindow::Flat);
ColumnSpectrum column_fft(const InterferenceMap& map, double phi_f,
                          FftWindow window = FftWindow::Flat);

/// l from a known dominant period: (2 pi / T) (F - P) / F^2 with F, P the
/// final and initial detunings measured from the anticrossing.
double slope_from_period(double period, double phi_f, double phi_i, double location = 0.0);

struct SlopeFit {
    double slope = 0.0;  ///< rad/ns per mPhi0
    double period = 0.0; ///< ns
    double phi_f = 0.0;  ///< column actually used
    ColumnSpectrum spectrum;
};

/// l = (2 pi / T) (phi_f - phi_i) / phi_f^2 with detunings measured from
/// `location`. When `gap_bound` is finite the column must satisfy
/// l phi_f / gap_bound >= kLargeAmplitudeRatio, otherwise FitError.
SlopeFit fit_slope(const InterferenceMap& map, double phi_f_ref,
                   double gap_bound = std::numeric_limits<double>::quiet_NaN(),
                   double location = 0.0, FftWindow window = FftWindow::Flat);

struct LinearityFit {
    double slope = 0.0;      ///< d(2 pi / T) / d(phi_f)
    double intercept = 0.0;  ///< rad/ns
    double rms_residual = 0.0;
    std::vector<ColumnSpectrum> columns;
};

/// Least-squares line through (phi_f, dominant_omega) for all columns with
/// phi_f >= phi_f_min. FitError with fewer than four columns.
LinearityFit fft_linearity(const InterferenceMap& map, double phi_f_min,
                           FftWindow window = FftWindow::Flat);

struct GapPoint {
    double phi_f = 0.0;
    double tau = 0.0;
    double population = 0.0;
};

struct GapFitOptions {
    double gap_max = 12.0;       ///< scan covers (0, gap_max]
    double gap_step = 0.01;
    double tolerance = 0.1;      ///< max |population residual| per point
    double location = 0.0;       ///< anticrossing the points refer to
};

struct GapCandidate {
    double gap = 0.0;
    double sse = 0.0;
    double max_residual = 0.0;
};

struct GapFit {
    double gap = 0.0;  ///< best candidate
    double sse = 0.0;
    std::vector<GapCandidate> candidates;  ///< every consistent local minimum, best first
};

/// Exhaustive scan of the gap: each point's population is predicted from
/// the closed-form phase and (1 + cos phi)/2, and the summed squared error
/// is minimised. Throws FitError ("inconsistent points") when no scanned gap
/// keeps every residual within options.tolerance.
GapFit fit_gap(std::span<const GapPoint> points, double slope, double phi_i,
               const GapFitOptions& options = {});

struct LocateOptions {
    double variance_threshold = 1e-3;    ///< relative to (map max - min)^2
    double distortion_threshold = 0.2;   ///< relative fringe-spacing deviation
    double minimum_prominence = 0.05;    ///< fringe minima, relative to map contrast
    double persistence = 1.0;            ///< mPhi0 a departure must last
    /// Slope for the one-anticrossing spacing prediction; NaN disables the
    /// search for a second anticrossing.
    double slope = std::numeric_limits<double>::quiet_NaN();
};

/// Fringe minima of one column (tau positions refined by a 3-point
/// parabola). A minimum counts when its prominence, the depth below the
/// lower of the two enclosing maxima, reaches min_prominence (absolute).
std::vector<double> fringe_minima(std::span<const ColumnSample> column, double min_prominence);

/// Local fringe spacing (ns) per cell: distance between the two fringe
/// minima bracketing the cell along tau; NaN where no such pair exists.
/// Stored like InterferenceMap::values.
std::vector<double> fringe_spacing_field(const InterferenceMap& map,
                                         double minimum_prominence = 0.05);

/// Spacing in tau predicted for one anticrossing at `location` in the large
/// amplitude limit: 2 pi (phi_f - phi_i) / (l (phi_f - location)^2).
double predicted_spacing(double slope, double phi_i, double phi_f, double location);

/// var(column) / (map max - min)^2 per phi_f column.
std::vector<double> relative_column_variance(const InterferenceMap& map);

/// First anticrossing: smallest phi_f whose relative column variance exceeds
/// the threshold. Second (needs options.slope): first phi_f beyond a stretch
/// that matched the one-anticrossing spacing where the column's median
/// spacing deviation exceeds the distortion threshold for `persistence`.
std::vector<double> locate_anticrossings(const InterferenceMap& map,
                                         const LocateOptions& options = {});

/// 1: k <= k12, 2: k >= k13, 3: in between.
int classify_rate(double rate, double k12, double k13);

/// Per-cell region label, stored like InterferenceMap::values.
std::vector<int> classify_regions(const InterferenceMap& map, double gap12, double gap13,
                                  double slope);

struct FittedGap {
    double location = 0.0;
    double gap = 0.0;
};

struct SpectroscopyFit {
    double slope_estimate = std::numeric_limits<double>::quiet_NaN();
    double reference_location = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> anticrossing_locations;
    std::vector<FittedGap> gap_estimates;
    double k12 = std::numeric_limits<double>::quiet_NaN();
    double k13 = std::numeric_limits<double>::quiet_NaN();
    /// name -> value diagnostics (fft resolution, gap sse, ...)
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<std::string> notes;
};

struct AnalyzeOptions {
    LocateOptions locate;
    /// Column for the slope fit; NaN picks location + 0.8 (phi_f max - location).
    double slope_column = std::numeric_limits<double>::quiet_NaN();
    /// Upper bound on the gap for the large-amplitude check; NaN: use the
    /// fitted gap after the fact.
    double gap_bound = std::numeric_limits<double>::quiet_NaN();
    /// Anticrossing the slope and gap fits refer to; NaN: the first located one.
    double reference_location = std::numeric_limits<double>::quiet_NaN();
    /// Slope to use when the map cannot provide one (NaN: none).
    double slope_fallback = std::numeric_limits<double>::quiet_NaN();
    double gap_tau = 3.85;                    ///< ns, nearest node is used
    std::vector<double> gap_offsets{1.0, 2.0};  ///< mPhi0 above each anticrossing
    GapFitOptions gap;
};

/// Full pipeline: locate anticrossings, fit the slope at the first one,
/// fit a gap at each, and derive the characteristic sweep rates.
SpectroscopyFit analyze_map(const InterferenceMap& map, const AnalyzeOptions& options = {});

}  // namespace lzs
