#include "lzs/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "lzs/analytic.hpp"
#include "lzs/errors.hpp"

namespace lzs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> dft_magnitude(std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const int bins = n / 2 + 1;
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(bins));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, x.data(), out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<double> mag(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(out);
    return mag;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

double map_contrast(const InterferenceMap& map) {
    if (map.values.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    return *hi - *lo;
}

void require_phi_i(const InterferenceMap& map) {
    if (!std::isfinite(map.grid.phi_i))
        throw ValidationError("map has no initial detuning phi_i (missing metadata)");
}

// Fringe minima of one column as refined tau positions. A minimum must be
// lower than its left neighbour and than the first differing value to its
// right (plateaus count once, at their centre), and its prominence must
// reach min_prominence.
std::vector<double> minima_on_grid(const std::vector<double>& y, double tau0, double dt,
                                   double min_prominence) {
    std::vector<double> found;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] < y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 >= n) break;
        if (y[j + 1] > y[i]) {
            double left_max = y[i];
            for (std::size_t a = i; a-- > 0;) {
                if (y[a] < y[i]) break;
                left_max = std::max(left_max, y[a]);
            }
            double right_max = y[i];
            for (std::size_t b = j + 1; b < n; ++b) {
                if (y[b] < y[i]) break;
                right_max = std::max(right_max, y[b]);
            }
            const double prominence = std::min(left_max, right_max) - y[i];
            if (prominence >= min_prominence) {
                double pos = 0.5 * static_cast<double>(i + j);
                if (i == j) {
                    const double a = y[i - 1], b = y[i], c = y[i + 1];
                    const double denom = a - 2.0 * b + c;
                    if (denom > 0.0) pos += 0.5 * (a - c) / denom;
                }
                found.push_back(tau0 + pos * dt);
            }
        }
        i = j + 1;
    }
    return found;
}

}  // namespace

ColumnSpectrum column_fft(std::span<const ColumnSample> column, double phi_f, FftWindow window) {
    const std::size_t n = column.size();
    if (n < 16) throw DomainError("column_fft needs at least 16 samples");
    const double span = column.back().tau - column.front().tau;
    const double dt = span / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw ValidationError("column_fft: tau must increase");
    for (std::size_t i = 1; i < n; ++i) {
        const double d = column[i].tau - column[i - 1].tau;
        if (std::abs(d - dt) > 1e-6 * dt) throw ValidationError("column_fft: non-uniform tau grid");
    }

    double mean = 0.0;
    for (const auto& s : column) mean += s.population;
    mean /= static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = column[i].population - mean;
        if (window == FftWindow::Hann)
            x[i] *= 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1)));
    }

    ColumnSpectrum out;
    out.phi_f = phi_f;
    out.resolution = kTwoPi / span;

    const auto mag = dft_magnitude(x);
    const std::size_t bins = mag.size();
    std::size_t k = 1;
    for (std::size_t b = 2; b < bins; ++b)
        if (mag[b] > mag[k]) k = b;
    if (mag[k] <= 1e-12 * static_cast<double>(n)) return out;

    double delta = 0.0;
    if (k + 1 < bins) {
        const double a = mag[k - 1], b = mag[k], c = mag[k + 1];
        const double denom = a - 2.0 * b + c;
        if (denom < 0.0) delta = 0.5 * (a - c) / denom;
    }
    const double nn = static_cast<double>(n);
    out.dominant_omega = kTwoPi * (static_cast<double>(k) + delta) / (nn * dt);
    out.power = mag[k] * mag[k] / (nn * nn);
    return out;
}

ColumnSpectrum column_fft(const InterferenceMap& map, double phi_f, FftWindow window) {
    const auto col = extract_column(map, phi_f);
    return column_fft(col, map.grid.phi_f.at(nearest_column(map, phi_f)), window);
}

double slope_from_period(double period, double phi_f, double phi_i, double location) {
    const double f = phi_f - location;
    const double p = phi_i - location;
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("period must be positive");
    if (!(f > 0.0) || !(p < 0.0))
        throw DomainError("pulse must start below and end above the anticrossing");
    return kTwoPi / period * (f - p) / (f * f);
}

SlopeFit fit_slope(const InterferenceMap& map, double phi_f_ref, double gap_bound, double location,
                   FftWindow window) {
    require_phi_i(map);
    SlopeFit fit;
    fit.spectrum = column_fft(map, phi_f_ref, window);
    fit.phi_f = fit.spectrum.phi_f;
    if (fit.spectrum.dominant_omega <= 0.0)
        throw FitError("column at phi_f = " + std::to_string(fit.phi_f) + " shows no oscillation");
    fit.period = kTwoPi / fit.spectrum.dominant_omega;
    fit.slope = slope_from_period(fit.period, fit.phi_f, map.grid.phi_i, location);
    if (std::isfinite(gap_bound)) {
        const double ratio = fit.slope * (fit.phi_f - location) / gap_bound;
        if (ratio < kLargeAmplitudeRatio) {
            std::ostringstream msg;
            msg << "phi_f = " << fit.phi_f << " is not in the large-amplitude regime (l*phi_f/gap = "
                << ratio << " < " << kLargeAmplitudeRatio << ")";
            throw FitError(msg.str());
        }
    }
    return fit;
}

LinearityFit fft_linearity(const InterferenceMap& map, double phi_f_min, FftWindow window) {
    LinearityFit fit;
    for (std::size_t j = 0; j < map.grid.phi_f.count; ++j) {
        const double pf = map.grid.phi_f.at(j);
        if (pf >= phi_f_min) fit.columns.push_back(column_fft(map, pf, window));
    }
    const std::size_t n = fit.columns.size();
    if (n < 4) throw FitError("fft_linearity needs at least 4 columns with phi_f >= phi_f_min");

    double mx = 0.0, my = 0.0;
    for (const auto& c : fit.columns) {
        mx += c.phi_f;
        my += c.dominant_omega;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& c : fit.columns) {
        sxx += (c.phi_f - mx) * (c.phi_f - mx);
        sxy += (c.phi_f - mx) * (c.dominant_omega - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (const auto& c : fit.columns) {
        const double r = c.dominant_omega - (fit.intercept + fit.slope * c.phi_f);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

GapFit fit_gap(std::span<const GapPoint> points, double slope, double phi_i,
               const GapFitOptions& options) {
    if (points.empty()) throw ValidationError("fit_gap needs at least one point");
    if (!(slope > 0.0) || !std::isfinite(slope)) throw ValidationError("slope must be positive");
    if (!(options.gap_max > 0.0) || !(options.gap_step > 0.0) || !(options.tolerance > 0.0))
        throw ValidationError("gap scan range, step and tolerance must be positive");

    std::vector<TrianglePulse> pulses;
    pulses.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.phi_f > options.location) || !(phi_i < options.location))
            throw ValidationError("every point must have its pulse cross the anticrossing");
        pulses.push_back(TrianglePulse(phi_i, p.phi_f, p.tau).relative_to(options.location));
    }

    const auto steps = static_cast<std::size_t>(std::floor(options.gap_max / options.gap_step + 1e-9));
    std::vector<double> sse(steps), worst(steps);
    for (std::size_t m = 0; m < steps; ++m) {
        const double gap = options.gap_step * static_cast<double>(m + 1);
        double s = 0.0, w = 0.0;
        for (std::size_t q = 0; q < points.size(); ++q) {
            const double pred = population_from_phase(stueckelberg_phase(slope, gap, pulses[q]).phi);
            const double r = std::abs(pred - points[q].population);
            s += r * r;
            w = std::max(w, r);
        }
        sse[m] = s;
        worst[m] = w;
    }

    GapFit fit;
    for (std::size_t m = 0; m < steps; ++m) {
        if (worst[m] > options.tolerance) continue;
        const bool left_ok = m == 0 || sse[m] <= sse[m - 1];
        const bool right_ok = m + 1 == steps || sse[m] <= sse[m + 1];
        if (left_ok && right_ok)
            fit.candidates.push_back({options.gap_step * static_cast<double>(m + 1), sse[m], worst[m]});
    }
    if (fit.candidates.empty()) throw FitError("inconsistent points: no gap fits every point within tolerance");
    std::stable_sort(fit.candidates.begin(), fit.candidates.end(),
                     [](const GapCandidate& a, const GapCandidate& b) { return a.sse < b.sse; });
    fit.gap = fit.candidates.front().gap;
    fit.sse = fit.candidates.front().sse;
    return fit;
}

std::vector<double> fringe_minima(std::span<const ColumnSample> column, double min_prominence) {
    if (column.size() < 3) return {};
    const double dt = (column.back().tau - column.front().tau) / static_cast<double>(column.size() - 1);
    std::vector<double> y;
    y.reserve(column.size());
    for (const auto& s : column) y.push_back(s.population);
    return minima_on_grid(y, column.front().tau, dt, min_prominence);
}

std::vector<double> fringe_spacing_field(const InterferenceMap& map, double minimum_prominence) {
    const std::size_t nt = map.grid.tau.count;
    const std::size_t np = map.grid.phi_f.count;
    std::vector<double> field(map.values.size(), std::numeric_limits<double>::quiet_NaN());
    const double contrast = map_contrast(map);
    if (contrast <= 0.0 || nt < 3) return field;

    std::vector<double> y(nt);
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t i = 0; i < nt; ++i) y[i] = map.at(i, j);
        const auto minima = minima_on_grid(y, map.grid.tau.min, map.grid.tau.step(),
                                           minimum_prominence * contrast);
        for (std::size_t m = 0; m + 1 < minima.size(); ++m) {
            const double spacing = minima[m + 1] - minima[m];
            for (std::size_t i = 0; i < nt; ++i) {
                const double t = map.grid.tau.at(i);
                if (t >= minima[m] && t < minima[m + 1]) field[i * np + j] = spacing;
            }
        }
    }
    return field;
}

double predicted_spacing(double slope, double phi_i, double phi_f, double location) {
    const double f = phi_f - location;
    const double p = phi_i - location;
    if (!(f > 0.0) || !(p < 0.0) || !(slope > 0.0))
        throw DomainError("predicted_spacing needs phi_i < location < phi_f and positive slope");
    return kTwoPi * (f - p) / (slope * f * f);
}

std::vector<double> relative_column_variance(const InterferenceMap& map) {
    const std::size_t nt = map.grid.tau.count;
    const std::size_t np = map.grid.phi_f.count;
    std::vector<double> out(np, 0.0);
    const double contrast = map_contrast(map);
    if (contrast <= 0.0) return out;
    for (std::size_t j = 0; j < np; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < nt; ++i) mean += map.at(i, j);
        mean /= static_cast<double>(nt);
        double var = 0.0;
        for (std::size_t i = 0; i < nt; ++i) var += (map.at(i, j) - mean) * (map.at(i, j) - mean);
        out[j] = var / static_cast<double>(nt) / (contrast * contrast);
    }
    return out;
}

std::vector<double> locate_anticrossings(const InterferenceMap& map, const LocateOptions& options) {
    std::vector<double> found;
    const auto variance = relative_column_variance(map);
    std::size_t first = variance.size();
    for (std::size_t j = 0; j < variance.size(); ++j) {
        if (variance[j] > options.variance_threshold) {
            first = j;
            break;
        }
    }
    if (first == variance.size()) return found;
    const double x1 = map.grid.phi_f.at(first);
    found.push_back(x1);

    if (!std::isfinite(options.slope) || !std::isfinite(map.grid.phi_i) || !(map.grid.phi_i < x1))
        return found;

    const std::size_t nt = map.grid.tau.count;
    const std::size_t np = map.grid.phi_f.count;
    const auto field = fringe_spacing_field(map, options.minimum_prominence);

    bool matched = false;
    std::size_t run_start = np;
    for (std::size_t j = first + 1; j < np; ++j) {
        const double pf = map.grid.phi_f.at(j);
        const double expected = predicted_spacing(options.slope, map.grid.phi_i, pf, x1);
        std::vector<double> dev;
        for (std::size_t i = 0; i < nt; ++i) {
            const double s = field[i * np + j];
            if (std::isfinite(s)) dev.push_back(std::abs(s - expected) / expected);
        }
        const double d = median(std::move(dev));
        if (!std::isfinite(d)) {
            run_start = np;
            continue;
        }
        if (!matched) {
            matched = d <= options.distortion_threshold;
            continue;
        }
        if (d > options.distortion_threshold) {
            if (run_start == np) run_start = j;
            if (pf - map.grid.phi_f.at(run_start) >= options.persistence) {
                found.push_back(map.grid.phi_f.at(run_start));
                break;
            }
        } else {
            run_start = np;
        }
    }
    return found;
}

int classify_rate(double rate, double k12, double k13) {
    const double k = std::abs(rate);
    if (k <= k12) return 1;
    if (k >= k13) return 2;
    return 3;
}

std::vector<int> classify_regions(const InterferenceMap& map, double gap12, double gap13,
                                  double slope) {
    const double k12 = characteristic_sweep_rate(gap12, slope);
    const double k13 = characteristic_sweep_rate(gap13, slope);
    const std::size_t nt = map.grid.tau.count;
    const std::size_t np = map.grid.phi_f.count;
    std::vector<int> labels(map.values.size());
    for (std::size_t i = 0; i < nt; ++i) {
        const double tau = map.grid.tau.at(i);
        for (std::size_t j = 0; j < np; ++j) {
            const double k = 2.0 * (map.grid.phi_f.at(j) - map.grid.phi_i) / tau;
            labels[i * np + j] = classify_rate(k, k12, k13);
        }
    }
    return labels;
}

SpectroscopyFit analyze_map(const InterferenceMap& map, const AnalyzeOptions& options) {
    require_phi_i(map);
    SpectroscopyFit fit;
    fit.anticrossing_locations = locate_anticrossings(map, options.locate);
    if (fit.anticrossing_locations.empty()) {
        fit.notes.push_back("no variance onset: no anticrossing inside the map");
        return fit;
    }

    const double ref = std::isfinite(options.reference_location) ? options.reference_location
                                                                  : fit.anticrossing_locations.front();
    fit.reference_location = ref;
    const double pf_max = map.grid.phi_f.max;
    const double column = std::isfinite(options.slope_column) ? options.slope_column
                                                              : ref + 0.8 * (pf_max - ref);
    try {
        const auto s = fit_slope(map, column, options.gap_bound, ref);
        fit.slope_estimate = s.slope;
        fit.residuals.emplace_back("slope_column", s.phi_f);
        fit.residuals.emplace_back("dominant_period", s.period);
        fit.residuals.emplace_back("fft_resolution", s.spectrum.resolution);
    } catch (const std::exception& e) {
        fit.notes.push_back(std::string("slope fit failed: ") + e.what());
        if (!std::isfinite(options.slope_fallback)) return fit;
        fit.slope_estimate = options.slope_fallback;
        fit.notes.push_back("using fallback slope");
    }

    // Second anticrossing needs the slope for the one-anticrossing prediction.
    if (fit.anticrossing_locations.size() < 2 && !std::isfinite(options.locate.slope)) {
        LocateOptions with_slope = options.locate;
        with_slope.slope = fit.slope_estimate;
        fit.anticrossing_locations = locate_anticrossings(map, with_slope);
    }

    std::vector<double> anchors = fit.anticrossing_locations;
    if (std::isfinite(options.reference_location)) anchors.front() = ref;
    const std::size_t t_index = [&] {
        const auto& ax = map.grid.tau;
        if (ax.count == 1) return std::size_t{0};
        const double r = std::round((options.gap_tau - ax.min) / ax.step());
        return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(ax.count - 1)));
    }();
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        std::vector<GapPoint> pts;
        for (double off : options.gap_offsets) {
            const double target = anchors[a] + off;
            if (target < map.grid.phi_f.min || target > map.grid.phi_f.max) continue;
            const std::size_t j = nearest_column(map, target);
            const double pf = map.grid.phi_f.at(j);
            if (pf <= anchors[a]) continue;
            pts.push_back({pf, map.grid.tau.at(t_index), map.at(t_index, j)});
        }
        const std::string tag = "gap_sse[" + std::to_string(a) + "]";
        if (pts.empty()) {
            fit.notes.push_back("no gap points inside the map for anticrossing " + std::to_string(a));
            continue;
        }
        try {
            GapFitOptions g = options.gap;
            g.location = anchors[a];
            const auto gf = fit_gap(pts, fit.slope_estimate, map.grid.phi_i, g);
            fit.gap_estimates.push_back({anchors[a], gf.gap});
            fit.residuals.emplace_back(tag, gf.sse);
        } catch (const std::exception& e) {
            fit.notes.push_back("gap fit at " + std::to_string(anchors[a]) + " failed: " + e.what());
        }
    }

    if (!fit.gap_estimates.empty())
        fit.k12 = characteristic_sweep_rate(fit.gap_estimates[0].gap, fit.slope_estimate);
    if (fit.gap_estimates.size() > 1)
        fit.k13 = characteristic_sweep_rate(fit.gap_estimates[1].gap, fit.slope_estimate);
    return fit;
}

}  // namespace lzs
