#include "vibrato/audio_buffer.hpp"

#include "vibrato/errors.hpp"

#include <cmath>

namespace vibrato {

AudioBuffer trim(const AudioBuffer& buffer, double start_s, double end_s) {
    const auto n = buffer.samples.size();
    if (!(start_s >= 0.0) || !(end_s > start_s)) {
        throw DomainError("trim: empty or inverted range [" +
                          std::to_string(start_s) + ", " +
                          std::to_string(end_s) + ")");
    }
    const auto i0 = static_cast<Eigen::Index>(std::lround(start_s * buffer.sample_rate));
    const auto i1 = static_cast<Eigen::Index>(std::lround(end_s * buffer.sample_rate));
    if (i1 > n) {
        throw DomainError("trim: end " + std::to_string(end_s) +
                          "s past buffer duration " +
                          std::to_string(buffer.duration_s()) + "s");
    }
    if (i1 <= i0) {
        throw DomainError("trim: range rounds to zero samples");
    }
    AudioBuffer out;
    out.samples = buffer.samples.segment(i0, i1 - i0);
    out.sample_rate = buffer.sample_rate;
    out.source_path = buffer.source_path;
    return out;
}

}  // namespace vibrato
