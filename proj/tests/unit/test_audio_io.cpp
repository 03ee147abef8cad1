#include "vibrato/audio_buffer.hpp"
#include "vibrato/errors.hpp"
#include "vibrato/wav.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <vector>

using namespace vibrato;

namespace {

// Test-side WAV writer, independent of the library encoder, so decode tests
// exercise real byte layouts.
struct RawWav {
    std::uint16_t format = 1;
    std::uint16_t channels = 1;
    std::uint32_t sample_rate = 44100;
    std::uint16_t bits = 16;
    bool extensible = false;
    bool junk_chunk = false;
    std::vector<unsigned char> payload;

    void u16(std::vector<unsigned char>& v, std::uint16_t x) const {
        v.push_back(x & 0xFF);
        v.push_back(x >> 8);
    }
    void u32(std::vector<unsigned char>& v, std::uint32_t x) const {
        v.push_back(x & 0xFF);
        v.push_back((x >> 8) & 0xFF);
        v.push_back((x >> 16) & 0xFF);
        v.push_back((x >> 24) & 0xFF);
    }

    std::filesystem::path write(const std::string& name) const {
        std::vector<unsigned char> fmt;
        u16(fmt, extensible ? 0xFFFE : format);
        u16(fmt, channels);
        u32(fmt, sample_rate);
        u32(fmt, sample_rate * channels * bits / 8);
        u16(fmt, channels * bits / 8);
        u16(fmt, bits);
        if (extensible) {
            u16(fmt, 22);    // cbSize
            u16(fmt, bits);  // valid bits
            u32(fmt, 0);     // channel mask
            u16(fmt, format);
            const unsigned char guid_tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00,
                                                 0x80, 0x00, 0x00, 0xAA, 0x00, 0x38,
                                                 0x9B, 0x71};
            fmt.insert(fmt.end(), guid_tail, guid_tail + 14);
        }

        std::vector<unsigned char> out;
        out.insert(out.end(), {'R', 'I', 'F', 'F'});
        u32(out, 0);  // patched below
        out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
        u32(out, static_cast<std::uint32_t>(fmt.size()));
        out.insert(out.end(), fmt.begin(), fmt.end());
        if (junk_chunk) {
            out.insert(out.end(), {'L', 'I', 'S', 'T'});
            u32(out, 4);
            out.insert(out.end(), {'I', 'N', 'F', 'O'});
        }
        out.insert(out.end(), {'d', 'a', 't', 'a'});
        u32(out, static_cast<std::uint32_t>(payload.size()));
        out.insert(out.end(), payload.begin(), payload.end());
        const auto riff_size = static_cast<std::uint32_t>(out.size() - 8);
        out[4] = riff_size & 0xFF;
        out[5] = (riff_size >> 8) & 0xFF;
        out[6] = (riff_size >> 16) & 0xFF;
        out[7] = (riff_size >> 24) & 0xFF;

        const auto path = std::filesystem::temp_directory_path() / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char*>(out.data()),
                static_cast<std::streamsize>(out.size()));
        return path;
    }

    void push_i16(std::int16_t v) {
        payload.push_back(static_cast<std::uint16_t>(v) & 0xFF);
        payload.push_back(static_cast<std::uint16_t>(v) >> 8);
    }
    void push_i24(std::int32_t v) {
        payload.push_back(v & 0xFF);
        payload.push_back((v >> 8) & 0xFF);
        payload.push_back((v >> 16) & 0xFF);
    }
    void push_f32(float v) {
        std::uint32_t raw;
        std::memcpy(&raw, &v, 4);
        u32(payload, raw);
    }
};

}  // namespace

TEST_CASE("decode scales 16-bit PCM to [-1, 1]") {
    RawWav w;
    for (int i = 0; i < 44100; ++i) w.push_i16(16384);
    const auto path = w.write("const16.wav");

    const AudioBuffer b = decode_wav(path.string());
    CHECK(b.sample_rate == 44100);
    CHECK(b.samples.size() == 44100);
    CHECK(b.samples.minCoeff() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.samples.maxCoeff() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("decode mixes stereo by arithmetic mean") {
    RawWav w;
    w.channels = 2;
    for (int i = 0; i < 1000; ++i) {
        w.push_i16(16384);
        w.push_i16(-16384);
    }
    const auto path = w.write("stereo.wav");
    const AudioBuffer b = decode_wav(path.string());
    CHECK(b.samples.abs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-9));

    // Mixdown is order-invariant across channels.
    RawWav swapped;
    swapped.channels = 2;
    for (int i = 0; i < 1000; ++i) {
        swapped.push_i16(-16384);
        swapped.push_i16(16384);
    }
    const AudioBuffer b2 = decode_wav(swapped.write("stereo_swapped.wav").string());
    CHECK((b.samples - b2.samples).abs().maxCoeff() == 0.0);
}

TEST_CASE("decode handles 24-bit, 32-bit and float32") {
    RawWav w24;
    w24.bits = 24;
    w24.push_i24(4194304);  // 2^22 = half scale
    w24.push_i24(-8388608);
    const AudioBuffer b24 = decode_wav(w24.write("w24.wav").string());
    CHECK(b24.samples[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b24.samples[1] == doctest::Approx(-1.0).epsilon(1e-12));

    RawWav wf;
    wf.format = 3;
    wf.bits = 32;
    wf.push_f32(0.25f);
    wf.push_f32(-0.75f);
    const AudioBuffer bf = decode_wav(wf.write("wf32.wav").string());
    CHECK(bf.samples[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bf.samples[1] == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("decode handles extensible headers and extra chunks") {
    RawWav w;
    w.extensible = true;
    w.junk_chunk = true;
    w.format = 1;
    w.bits = 24;
    for (int i = 0; i < 100; ++i) w.push_i24(2097152);  // 2^21 = quarter scale
    const AudioBuffer b = decode_wav(w.write("ext24.wav").string());
    CHECK(b.samples.size() == 100);
    CHECK(b.samples[0] == doctest::Approx(0.25).epsilon(1e-12));

    RawWav bad;
    bad.extensible = true;
    bad.format = 7;  // mu-law subformat inside the extensible GUID
    bad.bits = 8;
    bad.payload.assign(50, 0x80);
    CHECK_THROWS_AS(decode_wav(bad.write("ext_mulaw.wav").string()), IoError);
}

TEST_CASE("decode keeps float content inside full scale") {
    RawWav hot;
    hot.format = 3;
    hot.bits = 32;
    hot.push_f32(2.0f);
    hot.push_f32(-1.0f);
    hot.push_f32(0.5f);
    const AudioBuffer b = decode_wav(hot.write("hot_float.wav").string());
    CHECK(b.samples.abs().maxCoeff() <= 1.0 + 1e-6);
    CHECK(b.samples[0] == doctest::Approx(1.0));
    CHECK(b.samples[2] == doctest::Approx(0.25));

    RawWav broken;
    broken.format = 3;
    broken.bits = 32;
    broken.push_f32(std::numeric_limits<float>::quiet_NaN());
    CHECK_THROWS_AS(decode_wav(broken.write("nan_float.wav").string()), IoError);
}

TEST_CASE("decode rejects unsupported formats") {
    RawWav mulaw;
    mulaw.format = 7;  // mu-law
    mulaw.bits = 8;
    mulaw.payload.assign(100, 0x80);
    CHECK_THROWS_AS(decode_wav(mulaw.write("mulaw.wav").string()), IoError);

    RawWav pcm8;
    pcm8.bits = 8;
    pcm8.payload.assign(100, 0x80);
    CHECK_THROWS_AS(decode_wav(pcm8.write("pcm8.wav").string()), IoError);

    RawWav empty;
    CHECK_THROWS_AS(decode_wav(empty.write("empty.wav").string()), IoError);

    CHECK_THROWS_AS(decode_wav("/nonexistent/nowhere.wav"), IoError);
}

TEST_CASE("encode-decode identity within one LSB") {
    AudioBuffer b;
    b.sample_rate = 8000;
    b.samples.resize(4000);
    for (Eigen::Index i = 0; i < b.samples.size(); ++i) {
        b.samples[i] = 0.8 * std::sin(2.0 * std::numbers::pi * 220.0 * i / 8000.0);
    }
    const auto path = std::filesystem::temp_directory_path() / "roundtrip.wav";
    write_wav_pcm16(b, path.string());
    const AudioBuffer back = decode_wav(path.string());

    REQUIRE(back.samples.size() == b.samples.size());
    CHECK((back.samples - b.samples).abs().maxCoeff() <= 1.0 / 32768.0);
    CHECK(back.sample_rate == b.sample_rate);
}

TEST_CASE("trim selects the half-open sample range") {
    AudioBuffer b;
    b.sample_rate = 44100;
    b.samples = Eigen::ArrayXd::LinSpaced(88200, 0.0, 1.0);

    SUBCASE("identity trim") {
        const AudioBuffer t = trim(b, 0.0, 2.0);
        CHECK(t.samples.size() == b.samples.size());
        CHECK((t.samples - b.samples).abs().maxCoeff() == 0.0);
    }
    SUBCASE("duration arithmetic") {
        const AudioBuffer t = trim(b, 0.5, 1.5);
        CHECK(t.samples.size() == 44100);
        CHECK(t.samples[0] == b.samples[22050]);
    }
    SUBCASE("inverted and empty ranges rejected") {
        CHECK_THROWS_AS(trim(b, 1.5, 1.0), DomainError);
        CHECK_THROWS_AS(trim(b, 1.0, 1.0), DomainError);
        CHECK_THROWS_AS(trim(b, 0.0, 2.5), DomainError);
    }
    SUBCASE("sample count tracks duration within rounding") {
        for (double t0 : {0.1234, 0.5, 0.987}) {
            for (double t1 : {1.01, 1.499, 1.9321}) {
                const auto n = trim(b, t0, t1).samples.size();
                const double expect = (t1 - t0) * b.sample_rate;
                CHECK(std::abs(static_cast<double>(n) - expect) <= 1.0);
            }
        }
    }
}
