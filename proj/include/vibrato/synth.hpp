#pragma once

#include "vibrato/audio_buffer.hpp"
#include "vibrato/string_model.hpp"

#include <cstdint>

namespace vibrato {

/// Ground-truth vibrato tone description. Frequency modulation is geometric
/// (2^(s*sin)) so depth_cents is exact by construction; harmonic k has
/// amplitude 1/k.
struct SynthSpec {
    double f_center = 440.0;      ///< Hz
    double depth_cents = 20.0;    ///< half excursion
    double rate_hz = 6.0;
    double duration_s = 2.0;
    double sample_rate = 44100.0;
    int n_harmonics = 3;
    double drift_hz_per_s = 0.0;  ///< linear drift of the center
    double noise_rms = 0.0;       ///< relative to signal RMS
    std::uint64_t seed = 1;
};

/// Renders the tone: instantaneous frequency
/// f(t) = (f_center + drift*t) * 2^((depth_cents/1200)*sin(2*pi*rate*t)),
/// phase integrated trapezoidally per sample, harmonics summed with 1/k
/// rolloff, peak-normalized to 0.9, then seeded Gaussian noise is added.
/// Deterministic for a fixed seed. Throws DomainError on aliasing or too
/// few cycles.
AudioBuffer render(const SynthSpec& spec);

/// The measurement the pipeline should recover from render(spec) played on
/// a string with open fundamental f_s. d_hz is the symmetrized Hz
/// half-excursion f_c*(2^s - 2^-s)/2; f_c includes half the total drift.
VibratoMeasurement true_measurement(const SynthSpec& spec, double f_s);

}  // namespace vibrato
