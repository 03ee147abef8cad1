#pragma once

#include "vibrato/audio_buffer.hpp"

#include <string>

namespace vibrato {

/// Decodes a RIFF/WAVE file into a normalized mono buffer.
///
/// Accepted sample formats: integer PCM at 16/24/32 bits and IEEE float32,
/// both plain and WAVE_FORMAT_EXTENSIBLE. Multichannel content is mixed
/// down by arithmetic mean; integer samples are scaled to [-1, 1] by the
/// format's maximum magnitude (e.g. 1/32768 for 16-bit).
///
/// Throws IoError for unreadable files, unsupported codecs or bit depths,
/// and zero-length audio.
AudioBuffer decode_wav(const std::string& path);

/// Writes a mono buffer as 16-bit PCM WAV. Samples are scaled by 32768 and
/// clamped to the int16 range, so decode(write(b)) stays within 1/32768 of b.
void write_wav_pcm16(const AudioBuffer& buffer, const std::string& path);

}  // namespace vibrato
