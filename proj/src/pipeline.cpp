#include "vibrato/pipeline.hpp"

#include "vibrato/csv.hpp"
#include "vibrato/errors.hpp"
#include "vibrato/wav.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace vibrato {

AnalysisResult analyze_buffer(const AudioBuffer& buffer,
                              const AnalysisParams& params) {
    if (!(params.string_freq_hz > 0.0)) {
        throw DomainError("analyze: string frequency must be positive");
    }
    if (params.center_hint_hz < params.string_freq_hz) {
        throw DomainError("analyze: center hint below the open string");
    }

    AudioBuffer excerpt = buffer;
    if (params.start_s || params.end_s) {
        const double start = params.start_s.value_or(0.0);
        const double end = params.end_s.value_or(buffer.duration_s());
        excerpt = trim(buffer, start, end);
    }

    const auto [f_min, f_max] =
        band_from_center(params.center_hint_hz, params.band_width_cents);
    YinConfig cfg = default_yin_config(excerpt.sample_rate, f_min, f_max);
    cfg.threshold = params.yin_threshold;
    if (params.yin_frame_length > 0) cfg.frame_length = params.yin_frame_length;
    if (params.yin_hop_length > 0) cfg.hop_length = params.yin_hop_length;

    AnalysisResult result;
    result.track = yin_track(excerpt, cfg);
    result.cycles = measure_cycles(result.track, params.smoothing, params.extrema);

    StringSpec string{params.string_freq_hz, ""};
    result.measurement = assemble_measurement(result.cycles, string);
    result.measurement.file = buffer.source_path;
    result.measurement.player = params.player;
    result.measurement.corpus = params.corpus;
    return result;
}

AnalysisResult analyze_file(const std::string& path,
                            const AnalysisParams& params) {
    return analyze_buffer(decode_wav(path), params);
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
    const csv::Table table = csv::read_csv_file(path);
    if (table.header.empty()) {
        return {};
    }
    const std::size_t col_path = table.column("path");
    const std::size_t col_fs = table.column("string_freq_hz");
    const std::size_t col_center = table.column("center_hint_hz");

    const auto optional_column = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (table.header[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    const int col_band = optional_column("band_width_cents");
    const int col_start = optional_column("start_s");
    const int col_end = optional_column("end_s");
    const int col_player = optional_column("player");
    const int col_corpus = optional_column("corpus");

    std::vector<ManifestRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        const auto context = [&](const std::string& msg) {
            return "manifest row " + std::to_string(r + 1) + ": " + msg;
        };
        ManifestRow row;
        row.path = cells[col_path];
        if (row.path.empty()) throw DomainError(context("empty path"));
        try {
            row.params.string_freq_hz = csv::parse_double(cells[col_fs]);
            row.params.center_hint_hz = csv::parse_double(cells[col_center]);
            if (col_band >= 0 && !cells[col_band].empty()) {
                row.params.band_width_cents = csv::parse_double(cells[col_band]);
            }
            if (col_start >= 0 && !cells[col_start].empty()) {
                row.params.start_s = csv::parse_double(cells[col_start]);
            }
            if (col_end >= 0 && !cells[col_end].empty()) {
                row.params.end_s = csv::parse_double(cells[col_end]);
            }
        } catch (const DomainError& e) {
            throw DomainError(context(e.what()));
        }
        if (!(row.params.string_freq_hz > 0.0)) {
            throw DomainError(context("string_freq_hz must be positive"));
        }
        if (row.params.center_hint_hz < row.params.string_freq_hz) {
            throw DomainError(context("center_hint_hz below string_freq_hz"));
        }
        if (row.params.start_s && row.params.end_s &&
            !(*row.params.start_s < *row.params.end_s)) {
            throw DomainError(context("start_s must precede end_s"));
        }
        if (col_player >= 0) row.params.player = cells[col_player];
        if (col_corpus >= 0) row.params.corpus = cells[col_corpus];
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

unsigned thread_budget(unsigned requested, std::size_t n_rows) {
    unsigned budget = requested;
    if (budget == 0) {
        budget = std::max(1u, std::thread::hardware_concurrency());
    }
    if (const char* env = std::getenv("VIBRATO_LAB_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) budget = std::min<unsigned>(budget, static_cast<unsigned>(parsed));
    }
    return static_cast<unsigned>(std::min<std::size_t>(budget, std::max<std::size_t>(n_rows, 1)));
}

}  // namespace

std::vector<BatchRow> run_batch(const std::vector<ManifestRow>& rows,
                                unsigned max_threads) {
    std::vector<BatchRow> results(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) results[i].row = rows[i];

    std::atomic<std::size_t> cursor{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= rows.size()) return;
            BatchRow& slot = results[i];
            try {
                slot.measurement = analyze_file(rows[i].path, rows[i].params).measurement;
                slot.status = "ok";
            } catch (const RejectionError& e) {
                slot.status = "rejected";
                slot.error = e.reason;
            } catch (const Error& e) {
                slot.status = "error";
                slot.error = e.what();
            }
        }
    };

    const unsigned n_threads = thread_budget(max_threads, rows.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

}  // namespace vibrato
