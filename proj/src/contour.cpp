#include "vibrato/contour.hpp"

#include "vibrato/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace vibrato {

namespace {

// Plateau-aware strict local maxima, scipy style: a plateau counts once, at
// its middle sample. Returned indices are interior.
std::vector<Eigen::Index> local_maxima(const Eigen::ArrayXd& y) {
    std::vector<Eigen::Index> maxima;
    const Eigen::Index n = y.size();
    Eigen::Index i = 1;
    while (i < n - 1) {
        if (y[i - 1] < y[i]) {
            Eigen::Index ahead = i + 1;
            while (ahead < n - 1 && y[ahead] == y[i]) ++ahead;
            if (y[ahead] < y[i]) {
                maxima.push_back((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        ++i;
    }
    return maxima;
}

// Keep the tallest peaks first, suppressing any candidate closer than
// min_dist frames to an already accepted one.
std::vector<Eigen::Index> enforce_distance(const std::vector<Eigen::Index>& peaks,
                                           const Eigen::ArrayXd& y,
                                           Eigen::Index min_dist) {
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return y[peaks[a]] > y[peaks[b]];
    });

    std::vector<bool> keep(peaks.size(), true);
    for (std::size_t k : order) {
        if (!keep[k]) continue;
        for (std::size_t j = 0; j < peaks.size(); ++j) {
            if (j != k && keep[j] && std::abs(peaks[j] - peaks[k]) < min_dist) {
                keep[j] = false;
            }
        }
    }

    std::vector<Eigen::Index> out;
    for (std::size_t j = 0; j < peaks.size(); ++j) {
        if (keep[j]) out.push_back(peaks[j]);
    }
    return out;
}

// Topographic prominence: extend from the peak until a strictly higher
// sample or the signal border, take the minimum on each side, and measure
// against the higher of the two bases.
double prominence_at(const Eigen::ArrayXd& y, Eigen::Index peak) {
    double left_min = y[peak];
    for (Eigen::Index j = peak - 1; j >= 0 && y[j] <= y[peak]; --j) {
        left_min = std::min(left_min, y[j]);
    }
    double right_min = y[peak];
    for (Eigen::Index j = peak + 1; j < y.size() && y[j] <= y[peak]; ++j) {
        right_min = std::min(right_min, y[j]);
    }
    return y[peak] - std::max(left_min, right_min);
}

std::vector<Eigen::Index> detect_peaks(const Eigen::ArrayXd& cents,
                                       Eigen::Index min_dist,
                                       double min_prominence) {
    std::vector<Eigen::Index> candidates = local_maxima(cents);
    candidates = enforce_distance(candidates, cents, min_dist);
    std::vector<Eigen::Index> out;
    for (Eigen::Index idx : candidates) {
        if (prominence_at(cents, idx) >= min_prominence) out.push_back(idx);
    }
    return out;
}

// Sub-frame refinement: vertex of the parabola through the extremum and its
// neighbours, so cycle times are not quantized to the hop.
Extremum refine(const Eigen::ArrayXd& times, const Eigen::ArrayXd& values,
                Eigen::Index idx, bool is_peak) {
    Extremum e;
    e.frame = idx;
    e.is_peak = is_peak;
    e.time_s = times[idx];
    e.freq_hz = values[idx];
    const double prev = values[idx - 1];
    const double cur = values[idx];
    const double next = values[idx + 1];
    const double denom = prev - 2.0 * cur + next;
    if ((is_peak && denom < 0.0) || (!is_peak && denom > 0.0)) {
        const double shift = 0.5 * (prev - next) / denom;
        const double dt = times[1] - times[0];
        e.time_s += shift * dt;
        e.freq_hz = cur - 0.25 * (prev - next) * shift;
    }
    return e;
}

}  // namespace

std::pair<std::vector<Extremum>, std::vector<Extremum>> find_extrema(
    const Eigen::Ref<const Eigen::ArrayXd>& times,
    const Eigen::Ref<const Eigen::ArrayXd>& values_hz,
    const ExtremaConfig& cfg) {
    if (!(cfg.min_rate_hz > 0.0) || !(cfg.min_rate_hz < cfg.max_rate_hz)) {
        throw DomainError("find_extrema: need 0 < min_rate_hz < max_rate_hz");
    }
    if (cfg.min_prominence_cents < 0.0) {
        throw DomainError("find_extrema: prominence must be >= 0");
    }
    if (times.size() != values_hz.size()) {
        throw DomainError("find_extrema: times/values length mismatch");
    }
    if (times.size() < 3) {
        throw DomainError("find_extrema: need at least 3 frames");
    }
    if ((values_hz <= 0.0).any()) {
        throw DomainError("find_extrema: non-positive frequency in contour");
    }

    const double fps = 1.0 / (times[1] - times[0]);
    const Eigen::Index min_dist =
        std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(fps / cfg.max_rate_hz)));

    // Prominence is gated on the log-frequency scale so the threshold is in
    // cents regardless of register.
    const Eigen::ArrayXd cents = 1200.0 * values_hz.log() / std::log(2.0);

    std::vector<Eigen::Index> peak_idx = detect_peaks(cents, min_dist, cfg.min_prominence_cents);
    std::vector<Eigen::Index> trough_idx =
        detect_peaks(-cents, min_dist, cfg.min_prominence_cents);

    // Merge to one sequence; of two same-type neighbours the more extreme wins.
    struct Tagged {
        Eigen::Index idx;
        bool is_peak;
    };
    std::vector<Tagged> merged;
    merged.reserve(peak_idx.size() + trough_idx.size());
    for (Eigen::Index i : peak_idx) merged.push_back({i, true});
    for (Eigen::Index i : trough_idx) merged.push_back({i, false});
    std::sort(merged.begin(), merged.end(),
              [](const Tagged& a, const Tagged& b) { return a.idx < b.idx; });

    std::vector<Tagged> alternating;
    for (const Tagged& t : merged) {
        if (!alternating.empty() && alternating.back().is_peak == t.is_peak) {
            const bool replace = t.is_peak
                                     ? values_hz[t.idx] > values_hz[alternating.back().idx]
                                     : values_hz[t.idx] < values_hz[alternating.back().idx];
            if (replace) alternating.back() = t;
            continue;
        }
        alternating.push_back(t);
    }

    std::vector<Extremum> peaks;
    std::vector<Extremum> troughs;
    for (const Tagged& t : alternating) {
        Extremum e = refine(times, values_hz, t.idx, t.is_peak);
        (t.is_peak ? peaks : troughs).push_back(e);
    }
    if (peaks.size() < 2 || troughs.size() < 2) {
        throw RejectionError("no-vibrato",
                             "find_extrema: fewer than 2 peaks or 2 troughs (" +
                                 std::to_string(peaks.size()) + " peaks, " +
                                 std::to_string(troughs.size()) + " troughs)");
    }
    return {std::move(peaks), std::move(troughs)};
}

std::vector<TrendNode> build_trend(const std::vector<Extremum>& extrema) {
    if (extrema.size() < 2) {
        throw DomainError("build_trend: need at least 2 extrema");
    }
    for (std::size_t i = 1; i < extrema.size(); ++i) {
        if (extrema[i].is_peak == extrema[i - 1].is_peak) {
            throw DomainError("build_trend: extrema must alternate");
        }
        if (!(extrema[i].time_s > extrema[i - 1].time_s)) {
            throw DomainError("build_trend: extremum times must increase");
        }
    }
    std::vector<TrendNode> trend;
    trend.reserve(extrema.size() - 1);
    for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
        trend.push_back({0.5 * (extrema[i].time_s + extrema[i + 1].time_s),
                         0.5 * (extrema[i].freq_hz + extrema[i + 1].freq_hz)});
    }
    return trend;
}

double trend_at(const std::vector<TrendNode>& trend, double t) {
    if (trend.empty()) throw DomainError("trend_at: empty trend");
    if (t <= trend.front().time_s) return trend.front().freq_hz;
    if (t >= trend.back().time_s) return trend.back().freq_hz;
    auto it = std::upper_bound(
        trend.begin(), trend.end(), t,
        [](double value, const TrendNode& node) { return value < node.time_s; });
    const TrendNode& right = *it;
    const TrendNode& left = *(it - 1);
    const double w = (t - left.time_s) / (right.time_s - left.time_s);
    return left.freq_hz + w * (right.freq_hz - left.freq_hz);
}

CycleAnalysis measure_cycles(const PitchTrack& track,
                             const SmoothingConfig& smoothing,
                             const ExtremaConfig& extrema_cfg) {
    if (track.size() < 3 || track.times.size() != track.f0.size()) {
        throw DomainError("measure_cycles: invalid pitch track");
    }

    // smoothing.window is an upper bound; the effective window is capped so
    // oscillations up to max_rate_hz pass the filter unattenuated.
    const double fps = track.frame_rate();
    int cap = static_cast<int>(std::floor(fps / (2.0 * extrema_cfg.max_rate_hz)));
    if (cap % 2 == 0) --cap;
    int window = std::min(smoothing.window, cap);
    int floor_window = smoothing.polyorder + 1;
    if (floor_window % 2 == 0) ++floor_window;
    window = std::max(window, floor_window);

    CycleAnalysis out;
    out.smoothed_f0 = savgol_smooth(track.f0, {window, smoothing.polyorder});

    auto [peaks, troughs] = find_extrema(track.times, out.smoothed_f0, extrema_cfg);
    std::vector<Extremum> extrema;
    extrema.reserve(peaks.size() + troughs.size());
    std::merge(peaks.begin(), peaks.end(), troughs.begin(), troughs.end(),
               std::back_inserter(extrema),
               [](const Extremum& a, const Extremum& b) { return a.time_s < b.time_s; });

    out.extrema = std::move(extrema);
    for (const Extremum& e : out.extrema) {
        (e.is_peak ? out.peak_indices : out.trough_indices).push_back(e.frame);
    }
    out.trend = build_trend(out.extrema);

    const auto n_ext = static_cast<Eigen::Index>(out.extrema.size());
    out.deviations_hz.resize(n_ext);
    out.deviations_cents.resize(n_ext);
    for (Eigen::Index i = 0; i < n_ext; ++i) {
        const Extremum& e = out.extrema[static_cast<std::size_t>(i)];
        const double trend_f = trend_at(out.trend, e.time_s);
        out.deviations_hz[i] = std::abs(e.freq_hz - trend_f);
        out.deviations_cents[i] = std::abs(1200.0 * std::log2(e.freq_hz / trend_f));
    }
    return out;
}

}  // namespace vibrato
