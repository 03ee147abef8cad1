#include "vibrato/synth.hpp"

#include "vibrato/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace vibrato {

namespace {

// Deterministic standard normal source: Box-Muller over mt19937_64, so the
// stream is identical across platforms (std::normal_distribution is not).
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = std::ldexp(static_cast<double>(engine_() >> 11) + 1.0, -53);
        const double u2 = std::ldexp(static_cast<double>(engine_() >> 11), -53);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

void validate(const SynthSpec& spec) {
    if (!(spec.sample_rate > 0.0) || !(spec.duration_s > 0.0)) {
        throw DomainError("synth: sample rate and duration must be positive");
    }
    if (!(spec.f_center > 0.0) || !(spec.rate_hz > 0.0)) {
        throw DomainError("synth: center and rate must be positive");
    }
    if (spec.depth_cents < 0.0 || spec.noise_rms < 0.0) {
        throw DomainError("synth: depth and noise must be >= 0");
    }
    if (spec.n_harmonics < 1) {
        throw DomainError("synth: need at least one harmonic");
    }
    const double excursion = std::exp2(spec.depth_cents / 1200.0);
    const double top = spec.f_center * excursion * spec.n_harmonics;
    const double drifted_top =
        (spec.f_center + std::max(0.0, spec.drift_hz_per_s * spec.duration_s)) *
        excursion * spec.n_harmonics;
    if (top >= spec.sample_rate / 2.0 || drifted_top >= spec.sample_rate / 2.0) {
        throw DomainError("synth: aliasing, highest partial " +
                          std::to_string(std::max(top, drifted_top)) +
                          " Hz >= Nyquist");
    }
    if (spec.duration_s * spec.rate_hz < 2.0) {
        throw DomainError("synth: fewer than two vibrato cycles");
    }
}

}  // namespace

AudioBuffer render(const SynthSpec& spec) {
    validate(spec);
    const auto n = static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.sample_rate));
    const double dt = 1.0 / spec.sample_rate;
    const double s_oct = spec.depth_cents / 1200.0;
    const double omega = 2.0 * std::numbers::pi * spec.rate_hz;

    // Instantaneous frequency, then trapezoidal phase accumulation.
    Eigen::ArrayXd freq(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        freq[i] = (spec.f_center + spec.drift_hz_per_s * t) *
                  std::exp2(s_oct * std::sin(omega * t));
    }
    Eigen::ArrayXd phase(n);
    phase[0] = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) {
        phase[i] = phase[i - 1] + std::numbers::pi * (freq[i - 1] + freq[i]) * dt;
    }

    Eigen::ArrayXd signal = Eigen::ArrayXd::Zero(n);
    for (int k = 1; k <= spec.n_harmonics; ++k) {
        signal += (static_cast<double>(k) * phase).sin() / static_cast<double>(k);
    }

    const double peak = signal.abs().maxCoeff();
    if (peak > 0.0) signal *= 0.9 / peak;

    if (spec.noise_rms > 0.0) {
        const double rms = std::sqrt(signal.square().mean());
        GaussianSource gauss(spec.seed);
        const double sigma = spec.noise_rms * rms;
        for (Eigen::Index i = 0; i < n; ++i) signal[i] += sigma * gauss.next();
    }

    AudioBuffer out;
    out.samples = std::move(signal);
    out.sample_rate = spec.sample_rate;
    out.source_path = "synth";
    return out;
}

VibratoMeasurement true_measurement(const SynthSpec& spec, double f_s) {
    validate(spec);
    if (!(f_s > 0.0) || f_s > spec.f_center) {
        throw DomainError("true_measurement: need 0 < f_s <= f_center");
    }
    const double f_c = spec.f_center + spec.drift_hz_per_s * spec.duration_s / 2.0;
    const double ratio = std::exp2(spec.depth_cents / 1200.0);

    VibratoMeasurement m;
    m.d_cents = spec.depth_cents;
    m.d_hz = f_c * (ratio - 1.0 / ratio) / 2.0;
    m.f_c = f_c;
    m.x_c = physical_center(f_s, f_c);
    m.D = physical_depth(m.d_hz, f_c, f_s);
    m.rate_hz = spec.rate_hz;
    m.n_cycles = static_cast<int>(std::floor(spec.duration_s * spec.rate_hz)) - 1;
    m.file = "synth";
    return m;
}

}  // namespace vibrato
