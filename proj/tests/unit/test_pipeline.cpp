#include "vibrato/errors.hpp"
#include "vibrato/pipeline.hpp"
#include "vibrato/synth.hpp"
#include "vibrato/wav.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace vibrato;

namespace {

namespace fs = std::filesystem;

fs::path fixture_dir() {
    const fs::path dir = fs::temp_directory_path() / "vibrato_pipeline_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_fixture(const std::string& name, double center, double depth,
                       double rate) {
    SynthSpec spec;
    spec.f_center = center;
    spec.depth_cents = depth;
    spec.rate_hz = rate;
    const fs::path path = fixture_dir() / name;
    write_wav_pcm16(render(spec), path.string());
    return path;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    f << text;
}

}  // namespace

TEST_CASE("analyze_file runs the whole chain") {
    const fs::path wav = write_fixture("a440.wav", 440.0, 20.0, 6.0);
    AnalysisParams params;
    params.string_freq_hz = 220.0;
    params.center_hint_hz = 440.0;
    params.player = "synthetic";
    params.corpus = "fixtures";

    const AnalysisResult result = analyze_file(wav.string(), params);
    CHECK(result.measurement.x_c == doctest::Approx(0.5).epsilon(0.01));
    CHECK(result.measurement.d_cents == doctest::Approx(20.0).epsilon(0.05));
    CHECK(result.measurement.rate_hz == doctest::Approx(6.0).epsilon(0.01));
    CHECK(result.measurement.file == wav.string());
    CHECK(result.measurement.player == "synthetic");
    CHECK(result.track.size() > 100);
    CHECK(!result.cycles.extrema.empty());
}

TEST_CASE("analyze honors trims") {
    const fs::path wav = write_fixture("trimmed.wav", 440.0, 20.0, 6.0);
    AnalysisParams params;
    params.string_freq_hz = 220.0;
    params.center_hint_hz = 440.0;
    params.start_s = 0.25;
    params.end_s = 1.75;
    const AnalysisResult result = analyze_file(wav.string(), params);
    CHECK(result.track.times[result.track.size() - 1] < 1.6);
    CHECK(result.measurement.rate_hz == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("analyze rejects bad parameter combinations") {
    const fs::path wav = write_fixture("gate.wav", 440.0, 20.0, 6.0);
    AnalysisParams params;
    params.string_freq_hz = 0.0;
    params.center_hint_hz = 440.0;
    CHECK_THROWS_AS(analyze_file(wav.string(), params), DomainError);
    params.string_freq_hz = 523.25;  // hint below the open string
    CHECK_THROWS_AS(analyze_file(wav.string(), params), DomainError);
}

TEST_CASE("read_manifest parses required and optional columns") {
    const fs::path dir = fixture_dir();
    const fs::path manifest = dir / "manifest_ok.csv";
    write_text(manifest,
               "path,string_freq_hz,center_hint_hz,band_width_cents,start_s,end_s,player,corpus\n"
               "a.wav,220,440,150,0.1,1.9,Fournier,commercial\n"
               "b.wav,98,196,,,,Ma,soundbank\n");
    const auto rows = read_manifest(manifest.string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].path == "a.wav");
    CHECK(rows[0].params.band_width_cents == 150.0);
    CHECK(rows[0].params.start_s.value() == doctest::Approx(0.1));
    CHECK(rows[0].params.player == "Fournier");
    CHECK(rows[1].params.band_width_cents == 200.0);  // default
    CHECK(!rows[1].params.start_s.has_value());
    CHECK(rows[1].params.corpus == "soundbank");
}

TEST_CASE("read_manifest validates rows") {
    const fs::path dir = fixture_dir();

    const fs::path missing_col = dir / "manifest_missing.csv";
    write_text(missing_col, "path,center_hint_hz\na.wav,440\n");
    CHECK_THROWS_AS(read_manifest(missing_col.string()), DomainError);

    const fs::path bad_number = dir / "manifest_nan.csv";
    write_text(bad_number, "path,string_freq_hz,center_hint_hz\na.wav,abc,440\n");
    CHECK_THROWS_AS(read_manifest(bad_number.string()), DomainError);

    const fs::path inverted = dir / "manifest_inverted.csv";
    write_text(inverted,
               "path,string_freq_hz,center_hint_hz,start_s,end_s\na.wav,220,440,1.5,1.0\n");
    CHECK_THROWS_AS(read_manifest(inverted.string()), DomainError);

    const fs::path hint_low = dir / "manifest_hint.csv";
    write_text(hint_low, "path,string_freq_hz,center_hint_hz\na.wav,440,220\n");
    CHECK_THROWS_AS(read_manifest(hint_low.string()), DomainError);

    CHECK_THROWS_AS(read_manifest((dir / "does_not_exist.csv").string()), IoError);

    const fs::path empty = dir / "manifest_empty.csv";
    write_text(empty, "");
    CHECK(read_manifest(empty.string()).empty());
}

TEST_CASE("run_batch keeps manifest order and isolates failures") {
    const fs::path a = write_fixture("batch_a.wav", 440.0, 20.0, 6.0);
    const fs::path b = write_fixture("batch_b.wav", 330.0, 15.0, 5.0);

    std::vector<ManifestRow> rows(3);
    rows[0].path = a.string();
    rows[0].params.string_freq_hz = 220.0;
    rows[0].params.center_hint_hz = 440.0;
    rows[1].path = (fixture_dir() / "missing.wav").string();
    rows[1].params.string_freq_hz = 220.0;
    rows[1].params.center_hint_hz = 440.0;
    rows[2].path = b.string();
    rows[2].params.string_freq_hz = 220.0;
    rows[2].params.center_hint_hz = 330.0;

    const auto results = run_batch(rows, 4);
    REQUIRE(results.size() == 3);
    CHECK(results[0].status == "ok");
    CHECK(results[1].status == "error");
    CHECK(!results[1].error.empty());
    CHECK(results[2].status == "ok");
    CHECK(results[0].row.path == a.string());
    CHECK(results[2].measurement->f_c == doctest::Approx(330.0).epsilon(0.01));
}

TEST_CASE("batch rows match single-file analysis field for field") {
    const fs::path wav = write_fixture("consistency.wav", 440.0, 25.0, 7.0);
    ManifestRow row;
    row.path = wav.string();
    row.params.string_freq_hz = 220.0;
    row.params.center_hint_hz = 440.0;
    row.params.player = "p";
    row.params.corpus = "c";

    const auto batch = run_batch({row}, 1);
    const VibratoMeasurement single = analyze_file(wav.string(), row.params).measurement;
    REQUIRE(batch[0].measurement.has_value());
    const VibratoMeasurement& m = *batch[0].measurement;
    CHECK(m.d_cents == single.d_cents);
    CHECK(m.d_hz == single.d_hz);
    CHECK(m.f_c == single.f_c);
    CHECK(m.D == single.D);
    CHECK(m.x_c == single.x_c);
    CHECK(m.rate_hz == single.rate_hz);
    CHECK(m.n_cycles == single.n_cycles);
    CHECK(m.player == single.player);
}

TEST_CASE("parallel and serial batches agree") {
    std::vector<ManifestRow> rows;
    for (int i = 0; i < 6; ++i) {
        ManifestRow row;
        row.path = write_fixture("par_" + std::to_string(i) + ".wav",
                                 330.0 + 20.0 * i, 20.0, 5.5).string();
        row.params.string_freq_hz = 220.0;
        row.params.center_hint_hz = 330.0 + 20.0 * i;
        rows.push_back(row);
    }
    const auto serial = run_batch(rows, 1);
    const auto parallel = run_batch(rows, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].status == parallel[i].status);
        CHECK(serial[i].measurement->f_c == parallel[i].measurement->f_c);
        CHECK(serial[i].measurement->d_cents == parallel[i].measurement->d_cents);
    }
}

TEST_CASE("VIBRATO_LAB_THREADS caps the pool without changing results") {
    const fs::path wav = write_fixture("capped.wav", 440.0, 20.0, 6.0);
    ManifestRow row;
    row.path = wav.string();
    row.params.string_freq_hz = 220.0;
    row.params.center_hint_hz = 440.0;

    setenv("VIBRATO_LAB_THREADS", "1", 1);
    const auto capped = run_batch({row, row}, 8);
    unsetenv("VIBRATO_LAB_THREADS");
    const auto normal = run_batch({row, row}, 8);
    REQUIRE(capped.size() == 2);
    CHECK(capped[0].status == "ok");
    CHECK(capped[0].measurement->d_cents == normal[0].measurement->d_cents);
}

TEST_CASE("non-vibrato input surfaces as a rejection row") {
    SynthSpec flat;
    flat.depth_cents = 0.0;
    const fs::path wav = fixture_dir() / "flat.wav";
    write_wav_pcm16(render(flat), wav.string());

    ManifestRow row;
    row.path = wav.string();
    row.params.string_freq_hz = 220.0;
    row.params.center_hint_hz = 440.0;
    const auto results = run_batch({row}, 1);
    CHECK(results[0].status == "rejected");
    CHECK(results[0].error == "no-vibrato");
    CHECK(!results[0].measurement.has_value());
}
