#pragma once

#include "vibrato/audio_buffer.hpp"
#include "vibrato/contour.hpp"
#include "vibrato/string_model.hpp"
#include "vibrato/yin.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vibrato {

/// Everything needed to turn one excerpt into a VibratoMeasurement.
/// Manifest rows and `analyze` flags both map onto this.
struct AnalysisParams {
    double string_freq_hz = 0.0;
    double center_hint_hz = 0.0;
    double band_width_cents = 200.0;
    std::optional<double> start_s;
    std::optional<double> end_s;

    double yin_threshold = 0.1;
    int yin_frame_length = 0;  ///< 0 = derive from the band
    int yin_hop_length = 0;    ///< 0 = derive from the sample rate

    SmoothingConfig smoothing;
    ExtremaConfig extrema;

    std::string player;
    std::string corpus;
};

/// Intermediate products alongside the measurement, for --dump-* outputs.
struct AnalysisResult {
    VibratoMeasurement measurement;
    PitchTrack track;
    CycleAnalysis cycles;
};

/// Runs decode -> trim -> YIN -> contour -> measurement on a decoded buffer.
AnalysisResult analyze_buffer(const AudioBuffer& buffer,
                              const AnalysisParams& params);

/// Same, starting from a WAV file on disk.
AnalysisResult analyze_file(const std::string& path,
                            const AnalysisParams& params);

/// One parsed manifest row.
struct ManifestRow {
    std::string path;
    AnalysisParams params;
};

/// Parses a batch manifest CSV. Required columns: path, string_freq_hz,
/// center_hint_hz. Optional: band_width_cents, start_s, end_s, player,
/// corpus. Row-level validation problems throw DomainError with the 1-based
/// row number in the message.
std::vector<ManifestRow> read_manifest(const std::string& path);

/// Outcome of one batch row; status is "ok", "rejected" or "error".
struct BatchRow {
    ManifestRow row;
    std::optional<VibratoMeasurement> measurement;
    std::string status;
    std::string error;
};

/// Analyzes every manifest row, never aborting on per-row failures. Rows run
/// in parallel on up to max_threads threads (0 = hardware concurrency,
/// capped by the VIBRATO_LAB_THREADS environment variable); results keep
/// manifest order regardless of scheduling.
std::vector<BatchRow> run_batch(const std::vector<ManifestRow>& rows,
                                unsigned max_threads = 0);

}  // namespace vibrato
