#include "vibrato/wav.hpp"

#include "vibrato/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace vibrato {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
};

double decode_sample(const unsigned char* p, std::uint16_t format, int bytes) {
    if (format == kFormatFloat) {
        float f;
        std::uint32_t raw = read_u32(p);
        std::memcpy(&f, &raw, sizeof f);
        return static_cast<double>(f);
    }
    switch (bytes) {
        case 2: {
            auto v = static_cast<std::int16_t>(read_u16(p));
            return v / 32768.0;
        }
        case 3: {
            std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
            if (v & 0x800000) v -= 0x1000000;
            return v / 8388608.0;
        }
        case 4: {
            auto v = static_cast<std::int32_t>(read_u32(p));
            return v / 2147483648.0;
        }
        default:
            throw IoError("wav: unreachable sample width");
    }
}

}  // namespace

AudioBuffer decode_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("wav: cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("wav: read failure on '" + path + "'");

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw IoError("wav: '" + path + "' is not a RIFF/WAVE file");
    }

    FmtChunk fmt;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) {
            throw IoError("wav: truncated chunk in '" + path + "'");
        }
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw IoError("wav: malformed fmt chunk");
            const unsigned char* f = bytes.data() + body;
            fmt.format = read_u16(f);
            fmt.channels = read_u16(f + 2);
            fmt.sample_rate = read_u32(f + 4);
            fmt.bits_per_sample = read_u16(f + 14);
            if (fmt.format == kFormatExtensible) {
                // extension: cbSize(2) validBits(2) channelMask(4) GUID(16)
                if (size < 40) throw IoError("wav: malformed extensible fmt chunk");
                fmt.format = read_u16(f + 24);  // first two bytes of the subformat GUID
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = size;
        }
        pos = body + size + (size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) {
        throw IoError("wav: missing fmt or data chunk in '" + path + "'");
    }
    if (fmt.channels < 1) throw IoError("wav: zero channels in '" + path + "'");
    if (fmt.sample_rate == 0) throw IoError("wav: zero sample rate in '" + path + "'");

    if (fmt.format == kFormatFloat) {
        if (fmt.bits_per_sample != 32) {
            throw IoError("wav: unsupported float width " +
                          std::to_string(fmt.bits_per_sample) + " in '" + path + "'");
        }
    } else if (fmt.format == kFormatPcm) {
        if (fmt.bits_per_sample != 16 && fmt.bits_per_sample != 24 &&
            fmt.bits_per_sample != 32) {
            throw IoError("wav: unsupported PCM bit depth " +
                          std::to_string(fmt.bits_per_sample) + " in '" + path + "'");
        }
    } else {
        throw IoError("wav: unsupported codec (format tag " +
                      std::to_string(fmt.format) + ") in '" + path + "'");
    }

    const int bytes_per_sample = fmt.bits_per_sample / 8;
    const std::size_t stride = static_cast<std::size_t>(bytes_per_sample) * fmt.channels;
    const std::size_t n_frames = stride == 0 ? 0 : data_size / stride;
    if (n_frames == 0) throw IoError("wav: zero-length audio in '" + path + "'");

    AudioBuffer out;
    out.samples.resize(static_cast<Eigen::Index>(n_frames));
    out.sample_rate = fmt.sample_rate;
    out.source_path = path;

    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        const unsigned char* frame = data + i * stride;
        for (unsigned ch = 0; ch < fmt.channels; ++ch) {
            acc += decode_sample(frame + ch * bytes_per_sample, fmt.format, bytes_per_sample);
        }
        out.samples[static_cast<Eigen::Index>(i)] = acc / fmt.channels;
    }

    if (!out.samples.allFinite()) {
        throw IoError("wav: non-finite samples in '" + path + "'");
    }
    // Float content may exceed full scale; rescale to keep samples in [-1, 1].
    const double peak = out.samples.abs().maxCoeff();
    if (peak > 1.0 + 1e-6) out.samples /= peak;
    return out;
}

namespace {

void append_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
    v.push_back((x >> 16) & 0xFF);
    v.push_back((x >> 24) & 0xFF);
}

void append_u16(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
}

}  // namespace

void write_wav_pcm16(const AudioBuffer& buffer, const std::string& path) {
    const auto n = buffer.samples.size();
    if (n == 0) throw DomainError("wav: refusing to write empty buffer");
    const auto rate = static_cast<std::uint32_t>(std::lround(buffer.sample_rate));

    std::vector<unsigned char> out;
    out.reserve(44 + static_cast<std::size_t>(n) * 2);
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(n) * 2;

    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    append_u32(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    append_u32(out, 16);
    append_u16(out, kFormatPcm);
    append_u16(out, 1);  // mono
    append_u32(out, rate);
    append_u32(out, rate * 2);  // byte rate
    append_u16(out, 2);         // block align
    append_u16(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    append_u32(out, data_bytes);

    for (Eigen::Index i = 0; i < n; ++i) {
        double scaled = std::lround(buffer.samples[i] * 32768.0);
        scaled = std::clamp(scaled, -32768.0, 32767.0);
        append_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("wav: cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("wav: write failure on '" + path + "'");
}

}  // namespace vibrato
