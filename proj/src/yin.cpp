#include "vibrato/yin.hpp"

#include "vibrato/errors.hpp"

#include <cmath>
#include <string>

namespace vibrato {

std::pair<double, double> band_from_center(double center_hint_hz,
                                           double width_cents) {
    if (!(center_hint_hz > 0.0)) {
        throw DomainError("band_from_center: center must be positive");
    }
    if (!(width_cents > 0.0)) {
        throw DomainError("band_from_center: width must be positive");
    }
    const double ratio = std::exp2(width_cents / 1200.0);
    return {center_hint_hz / ratio, center_hint_hz * ratio};
}

YinConfig default_yin_config(double sample_rate, double f_min, double f_max) {
    YinConfig cfg;
    cfg.f_min = f_min;
    cfg.f_max = f_max;
    int frame = 1;
    const double wanted = 4.0 * sample_rate / f_min;
    while (frame < wanted) frame *= 2;
    cfg.frame_length = frame;
    const int hop = std::max(1, static_cast<int>(std::lround(256.0 * sample_rate / 44100.0)));
    cfg.hop_length = std::min(hop, frame);
    cfg.threshold = 0.1;
    return cfg;
}

PitchTrack yin_track(const AudioBuffer& buffer, const YinConfig& cfg) {
    const double sr = buffer.sample_rate;
    if (!(cfg.f_min > 0.0) || !(cfg.f_min < cfg.f_max) || !(cfg.f_max < sr / 2.0)) {
        throw DomainError("yin: need 0 < f_min < f_max < sample_rate/2");
    }
    if (!(cfg.threshold > 0.0) || !(cfg.threshold < 1.0)) {
        throw DomainError("yin: threshold must lie in (0, 1)");
    }
    const int tau_min = static_cast<int>(std::floor(sr / cfg.f_max));
    const int tau_max = static_cast<int>(std::ceil(sr / cfg.f_min));
    if (tau_min < 1 || tau_min > tau_max) {
        throw DomainError("yin: empty lag search band");
    }
    if (cfg.frame_length < 2 * tau_max) {
        throw DomainError("yin: frame_length " + std::to_string(cfg.frame_length) +
                          " < two periods of f_min (" + std::to_string(2 * tau_max) + ")");
    }
    if (cfg.hop_length < 1 || cfg.hop_length > cfg.frame_length) {
        throw DomainError("yin: need 0 < hop_length <= frame_length");
    }
    if (buffer.samples.size() < cfg.frame_length) {
        throw DomainError("yin: buffer shorter than one frame");
    }

    // The difference window spans one period of the lowest searched pitch,
    // centered inside the frame so time stamps match the analyzed span.
    const int window = tau_max;
    const int span = window + tau_max;
    const Eigen::Index offset = (cfg.frame_length - span) / 2;

    const Eigen::Index n_frames =
        (buffer.samples.size() - cfg.frame_length) / cfg.hop_length + 1;

    PitchTrack track;
    track.times.resize(n_frames);
    track.f0.resize(n_frames);
    track.confidence.resize(n_frames);

    Eigen::ArrayXd diff(tau_max + 1);
    Eigen::ArrayXd cmndf(tau_max + 1);

    for (Eigen::Index frame = 0; frame < n_frames; ++frame) {
        const Eigen::Index start = frame * cfg.hop_length + offset;
        const auto base = buffer.samples.matrix().segment(start, window);

        diff[0] = 0.0;
        cmndf[0] = 1.0;
        double running = 0.0;
        for (int tau = 1; tau <= tau_max; ++tau) {
            const double d =
                (base - buffer.samples.matrix().segment(start + tau, window)).squaredNorm();
            diff[tau] = d;
            running += d;
            cmndf[tau] = running > 0.0 ? d * tau / running : 1.0;
        }

        // First lag under threshold, descended to its local minimum.
        int selected = -1;
        for (int tau = tau_min; tau <= tau_max; ++tau) {
            if (cmndf[tau] < cfg.threshold) {
                while (tau + 1 <= tau_max && cmndf[tau + 1] < cmndf[tau]) ++tau;
                selected = tau;
                break;
            }
        }
        if (selected < 0) {
            selected = tau_min;
            for (int tau = tau_min + 1; tau <= tau_max; ++tau) {
                if (cmndf[tau] < cmndf[selected]) selected = tau;
            }
        }

        double refined = selected;
        if (selected > 1 && selected < tau_max) {
            const double left = cmndf[selected - 1];
            const double mid = cmndf[selected];
            const double right = cmndf[selected + 1];
            const double denom = left - 2.0 * mid + right;
            if (denom > 1e-30) {
                refined += 0.5 * (left - right) / denom;
            }
        }

        const double t_center = (static_cast<double>(frame) * cfg.hop_length +
                                 cfg.frame_length / 2.0) / sr;
        track.times[frame] = t_center;
        track.f0[frame] = std::clamp(sr / refined, cfg.f_min, cfg.f_max);
        track.confidence[frame] = cmndf[selected];
    }
    return track;
}

}  // namespace vibrato
