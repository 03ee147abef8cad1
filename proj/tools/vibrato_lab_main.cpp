// vibrato-lab: batch-oriented vibrato measurement for bowed-string audio.
//
// Subcommands: analyze, batch, fit, model, synth.
// Exit codes: 0 ok, 1 analysis rejection, 2 usage error, 3 I/O error.

#include "vibrato/csv.hpp"
#include "vibrato/errors.hpp"
#include "vibrato/pipeline.hpp"
#include "vibrato/stats.hpp"
#include "vibrato/string_model.hpp"
#include "vibrato/synth.hpp"
#include "vibrato/wav.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace vibrato;

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

const std::vector<std::string> kMeasurementColumns = {
    "d_cents", "d_hz", "f_c_hz", "D_frac", "x_c_frac",
    "rate_hz", "n_cycles", "file", "player", "corpus"};

std::vector<std::string> measurement_cells(const VibratoMeasurement& m) {
    return {csv::format_double(m.d_cents),
            csv::format_double(m.d_hz),
            csv::format_double(m.f_c),
            csv::format_double(m.D),
            csv::format_double(m.x_c),
            csv::format_double(m.rate_hz),
            std::to_string(m.n_cycles),
            m.file,
            m.player,
            m.corpus};
}

json measurement_json(const VibratoMeasurement& m) {
    return json{{"d_cents", m.d_cents},   {"d_hz", m.d_hz},
                {"f_c_hz", m.f_c},        {"D_frac", m.D},
                {"x_c_frac", m.x_c},      {"rate_hz", m.rate_hz},
                {"n_cycles", m.n_cycles}, {"file", m.file},
                {"player", m.player},     {"corpus", m.corpus}};
}

void write_track_csv(const std::string& path, const PitchTrack& track) {
    csv::Table t;
    t.header = {"time_s", "f0_hz", "confidence"};
    for (Eigen::Index i = 0; i < track.size(); ++i) {
        t.rows.push_back({csv::format_double(track.times[i]),
                          csv::format_double(track.f0[i]),
                          csv::format_double(track.confidence[i])});
    }
    csv::write_csv_file(path, t);
}

void write_cycles_csv(const std::string& path, const CycleAnalysis& cycles) {
    csv::Table t;
    t.header = {"time_s", "type", "f0_hz", "trend_hz", "deviation_hz", "deviation_cents"};
    for (std::size_t i = 0; i < cycles.extrema.size(); ++i) {
        const Extremum& e = cycles.extrema[i];
        t.rows.push_back({csv::format_double(e.time_s),
                          e.is_peak ? "peak" : "trough",
                          csv::format_double(e.freq_hz),
                          csv::format_double(trend_at(cycles.trend, e.time_s)),
                          csv::format_double(cycles.deviations_hz[static_cast<Eigen::Index>(i)]),
                          csv::format_double(cycles.deviations_cents[static_cast<Eigen::Index>(i)])});
    }
    csv::write_csv_file(path, t);
}

struct AnalyzeOptions {
    std::string file;
    AnalysisParams params;
    double center_hint = 0.0;
    double string_freq = 0.0;
    double start_s = -1.0;
    double end_s = -1.0;
    std::string format = "csv";
    std::string dump_track;
    std::string dump_cycles;
};

void add_analysis_flags(CLI::App& cmd, AnalyzeOptions& opt) {
    cmd.add_option("--string-freq", opt.string_freq,
                   "Open-string fundamental f_s, Hz")->required();
    cmd.add_option("--center-hint", opt.center_hint,
                   "Intended center pitch, Hz")->required();
    cmd.add_option("--band-width", opt.params.band_width_cents,
                   "Half-width of the pitch search band, cents")->capture_default_str();
    cmd.add_option("--start", opt.start_s, "Trim start, seconds");
    cmd.add_option("--end", opt.end_s, "Trim end, seconds");
    cmd.add_option("--threshold", opt.params.yin_threshold,
                   "YIN absolute threshold")->capture_default_str();
    cmd.add_option("--frame-length", opt.params.yin_frame_length,
                   "YIN frame length, samples (0 = auto)");
    cmd.add_option("--hop", opt.params.yin_hop_length,
                   "YIN hop length, samples (0 = auto)");
    cmd.add_option("--savgol-window", opt.params.smoothing.window,
                   "Smoothing window upper bound, frames")->capture_default_str();
    cmd.add_option("--savgol-polyorder", opt.params.smoothing.polyorder,
                   "Smoothing polynomial order")->capture_default_str();
    cmd.add_option("--min-rate", opt.params.extrema.min_rate_hz,
                   "Lowest plausible vibrato rate, Hz")->capture_default_str();
    cmd.add_option("--max-rate", opt.params.extrema.max_rate_hz,
                   "Highest plausible vibrato rate, Hz")->capture_default_str();
    cmd.add_option("--min-prominence", opt.params.extrema.min_prominence_cents,
                   "Extremum prominence floor, cents")->capture_default_str();
    cmd.add_option("--player", opt.params.player, "Player metadata label");
    cmd.add_option("--corpus", opt.params.corpus, "Corpus metadata label");
}

int cmd_analyze(AnalyzeOptions& opt) {
    opt.params.string_freq_hz = opt.string_freq;
    opt.params.center_hint_hz = opt.center_hint;
    if (opt.start_s >= 0.0) opt.params.start_s = opt.start_s;
    if (opt.end_s >= 0.0) opt.params.end_s = opt.end_s;

    AnalysisResult result;
    try {
        result = analyze_file(opt.file, opt.params);
    } catch (const RejectionError& e) {
        std::cout << json{{"status", "rejected"},
                          {"reason", e.reason},
                          {"message", e.what()},
                          {"file", opt.file}}
                         .dump()
                  << "\n";
        return kExitRejected;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        std::cout << json{{"status", "error"},
                          {"reason", "domain-error"},
                          {"message", e.what()},
                          {"file", opt.file}}
                         .dump()
                  << "\n";
        return kExitRejected;
    }

    if (!opt.dump_track.empty()) write_track_csv(opt.dump_track, result.track);
    if (!opt.dump_cycles.empty()) write_cycles_csv(opt.dump_cycles, result.cycles);

    if (opt.format == "json") {
        std::cout << measurement_json(result.measurement).dump(2) << "\n";
    } else {
        csv::Table t;
        t.header = kMeasurementColumns;
        t.rows.push_back(measurement_cells(result.measurement));
        csv::write_csv(std::cout, t);
    }
    return kExitOk;
}

int cmd_batch(const std::string& manifest_path, const std::string& out_path,
              unsigned threads) {
    std::vector<ManifestRow> rows;
    try {
        rows = read_manifest(manifest_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    if (rows.empty()) {
        std::cerr << "warning: empty manifest '" << manifest_path << "'\n";
    }

    const std::vector<BatchRow> results = run_batch(rows, threads);

    csv::Table t;
    t.header = kMeasurementColumns;
    t.header.push_back("status");
    t.header.push_back("error");
    std::size_t failures = 0;
    for (const BatchRow& r : results) {
        std::vector<std::string> cells;
        if (r.measurement) {
            cells = measurement_cells(*r.measurement);
        } else {
            cells.assign(kMeasurementColumns.size(), "");
            cells[7] = r.row.path;
            cells[8] = r.row.params.player;
            cells[9] = r.row.params.corpus;
            ++failures;
        }
        cells.push_back(r.status);
        cells.push_back(r.error);
        t.rows.push_back(std::move(cells));
    }
    try {
        csv::write_csv_file(out_path, t);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cerr << results.size() << " rows, " << failures << " failed\n";
    return kExitOk;
}

struct FitOptions {
    std::string results_path;
    std::string x_col;
    std::string y_col;
    std::string group_col;
    int degree = 2;
    std::string format = "csv";
    std::string out_path;
};

int cmd_fit(const FitOptions& opt) {
    csv::Table table;
    try {
        table = csv::read_csv_file(opt.results_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::vector<double> xs, ys;
    std::vector<std::string> labels;
    std::size_t skipped = 0;
    try {
        const std::size_t cx = table.column(opt.x_col);
        const std::size_t cy = table.column(opt.y_col);
        const int cg = opt.group_col.empty()
                           ? -1
                           : static_cast<int>(table.column(opt.group_col));
        for (const auto& row : table.rows) {
            try {
                const double x = csv::parse_double(row[cx]);
                const double y = csv::parse_double(row[cy]);
                xs.push_back(x);
                ys.push_back(y);
                labels.push_back(cg >= 0 ? row[static_cast<std::size_t>(cg)] : "combined");
            } catch (const DomainError&) {
                ++skipped;  // non-numeric cell (failed batch row, etc.)
            }
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (skipped > 0) {
        std::cerr << "warning: skipped " << skipped << " non-numeric rows\n";
    }

    std::vector<GroupStats> groups;
    try {
        if (!opt.group_col.empty()) {
            groups = group_stats(xs, ys, labels, opt.degree);
        }
        // Combined fit over everything, always reported.
        std::vector<std::string> all(labels.size(), "combined");
        std::vector<GroupStats> combined = group_stats(xs, ys, all, opt.degree);
        groups.insert(groups.end(), combined.begin(), combined.end());
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::ostringstream body;
    if (opt.format == "json") {
        json report = json::array();
        for (const GroupStats& g : groups) {
            json item{{"group", g.key}, {"n", g.n}, {"degree", opt.degree}};
            if (g.y_mean) item["y_mean"] = *g.y_mean;
            if (g.y_std) item["y_std"] = *g.y_std;
            if (g.fit) {
                item["r_squared"] = g.fit->r_squared;
                item["coefficients"] = std::vector<double>(
                    g.fit->coefficients.data(),
                    g.fit->coefficients.data() + g.fit->coefficients.size());
                if (g.fit->pearson_r) item["pearson_r"] = *g.fit->pearson_r;
                if (g.fit->vertex) {
                    item["vertex"] = {{"a", g.fit->vertex->a},
                                      {"h", g.fit->vertex->h},
                                      {"k", g.fit->vertex->k}};
                }
            }
            if (g.spearman) {
                item["spearman"] = {{"rho", g.spearman->rho},
                                    {"p", g.spearman->p_value},
                                    {"n", g.spearman->n},
                                    {"method", g.spearman->method}};
            }
            if (!g.warnings.empty()) item["warnings"] = g.warnings;
            report.push_back(std::move(item));
        }
        body << report.dump(2) << "\n";
    } else {
        csv::Table t;
        t.header = {"group", "degree", "a", "h", "k", "r", "r2", "rho", "p", "n"};
        for (const GroupStats& g : groups) {
            std::string a, h, k, r, r2;
            if (g.fit) {
                r2 = csv::format_double(g.fit->r_squared);
                if (g.fit->vertex) {
                    a = csv::format_double(g.fit->vertex->a);
                    h = csv::format_double(g.fit->vertex->h);
                    k = csv::format_double(g.fit->vertex->k);
                } else {
                    // degree 1: a = slope, k = intercept, h empty
                    a = csv::format_double(g.fit->coefficients[g.fit->degree]);
                    k = csv::format_double(g.fit->coefficients[0]);
                }
                if (g.fit->pearson_r) r = csv::format_double(*g.fit->pearson_r);
            }
            t.rows.push_back({g.key, std::to_string(opt.degree), a, h, k, r, r2,
                              g.spearman ? csv::format_double(g.spearman->rho) : "",
                              g.spearman ? csv::format_double(g.spearman->p_value) : "",
                              std::to_string(g.n)});
            for (const std::string& w : g.warnings) std::cerr << "warning: " << w << "\n";
        }
        csv::write_csv(body, t);
    }

    if (opt.out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(opt.out_path, std::ios::trunc);
        if (!f) {
            std::cerr << "error: cannot open '" << opt.out_path << "'\n";
            return kExitIo;
        }
        f << body.str();
    }
    return kExitOk;
}

struct ModelOptions {
    double f_string = 220.0;
    double const_D = 0.0;
    std::vector<double> quad;  // a,h,k
    double x_min = 0.0;
    double x_max = 0.9;
    int steps = 200;
    std::string out_path;
};

int cmd_model(const ModelOptions& opt) {
    if (opt.steps < 2) {
        std::cerr << "error: --steps must be >= 2\n";
        return kExitUsage;
    }
    const Eigen::ArrayXd grid =
        Eigen::ArrayXd::LinSpaced(opt.steps, opt.x_min, opt.x_max);
    VertexQuadratic quad{opt.quad[0], opt.quad[1], opt.quad[2]};

    ModelCurves curves;
    try {
        curves = model_curves(opt.f_string, grid, opt.const_D, quad);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    csv::Table t;
    t.header = {"x_c", "cents_uncompensated", "cents_compensated"};
    for (Eigen::Index i = 0; i < curves.x.size(); ++i) {
        t.rows.push_back({csv::format_double(curves.x[i]),
                          csv::format_double(curves.cents_uncompensated[i]),
                          csv::format_double(curves.cents_compensated[i])});
    }

    // With --out, the crossing report owns stdout; otherwise the CSV does.
    std::ostream& report = opt.out_path.empty() ? std::cerr : std::cout;
    if (opt.out_path.empty()) {
        csv::write_csv(std::cout, t);
    } else {
        try {
            csv::write_csv_file(opt.out_path, t);
        } catch (const IoError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitIo;
        }
    }
    if (curves.crossings.empty()) {
        report << "no crossing on grid\n";
    } else {
        for (double x : curves.crossings) {
            report << "crossing x_c = " << csv::format_double(x) << "\n";
        }
    }
    return kExitOk;
}

struct SynthOptions {
    SynthSpec spec;
    double string_freq = 220.0;
    std::string out_path;
    std::string truth_path;
};

int cmd_synth(const SynthOptions& opt) {
    try {
        const AudioBuffer buffer = render(opt.spec);
        write_wav_pcm16(buffer, opt.out_path);
        if (!opt.truth_path.empty()) {
            const VibratoMeasurement truth = true_measurement(opt.spec, opt.string_freq);
            json j{{"spec",
                    {{"f_center", opt.spec.f_center},
                     {"depth_cents", opt.spec.depth_cents},
                     {"rate_hz", opt.spec.rate_hz},
                     {"duration_s", opt.spec.duration_s},
                     {"sample_rate", opt.spec.sample_rate},
                     {"n_harmonics", opt.spec.n_harmonics},
                     {"drift_hz_per_s", opt.spec.drift_hz_per_s},
                     {"noise_rms", opt.spec.noise_rms},
                     {"seed", opt.spec.seed}}},
                   {"string_freq_hz", opt.string_freq},
                   {"truth", measurement_json(truth)}};
            std::ofstream f(opt.truth_path, std::ios::trunc);
            if (!f) throw IoError("cannot open '" + opt.truth_path + "'");
            f << j.dump(2) << "\n";
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "wrote " << opt.out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vibrato-lab: vibrato depth, center, position and rate from cello notes"};
    app.require_subcommand(1);

    AnalyzeOptions analyze_opt;
    CLI::App* analyze = app.add_subcommand("analyze", "Measure one excerpt");
    analyze->add_option("file", analyze_opt.file, "WAV file")->required();
    add_analysis_flags(*analyze, analyze_opt);
    analyze->add_option("--format", analyze_opt.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--dump-track", analyze_opt.dump_track,
                        "Write the pitch track CSV here");
    analyze->add_option("--dump-cycles", analyze_opt.dump_cycles,
                        "Write per-extremum cycle CSV here");

    std::string manifest_path, batch_out;
    unsigned batch_threads = 0;
    CLI::App* batch = app.add_subcommand("batch", "Measure every manifest row");
    batch->add_option("manifest", manifest_path, "Manifest CSV")->required();
    batch->add_option("out", batch_out, "Output CSV")->required();
    batch->add_option("--threads", batch_threads,
                      "Worker threads (0 = auto; env VIBRATO_LAB_THREADS caps)");

    FitOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "Regress columns of a results table");
    fit->add_option("results", fit_opt.results_path, "Results CSV")->required();
    fit->add_option("--x", fit_opt.x_col, "X column name")->required();
    fit->add_option("--y", fit_opt.y_col, "Y column name")->required();
    fit->add_option("--degree", fit_opt.degree, "Polynomial degree 1 or 2")->capture_default_str()
        ->check(CLI::Range(1, 2));
    fit->add_option("--group", fit_opt.group_col, "Group column for per-group fits");
    fit->add_option("--format", fit_opt.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    fit->add_option("--out", fit_opt.out_path, "Write the report here instead of stdout");

    ModelOptions model_opt;
    CLI::App* model = app.add_subcommand(
        "model", "Pitch-variation curves for constant vs compensated finger depth");
    model->add_option("--f-string", model_opt.f_string, "Open-string frequency, Hz")->capture_default_str();
    model->add_option("--const-D", model_opt.const_D, "Uncompensated physical depth")
        ->required();
    model->add_option("--quad-D", model_opt.quad,
                      "Compensated depth quadratic a,h,k (vertex form)")
        ->delimiter(',')
        ->expected(3)
        ->required();
    model->add_option("--x-min", model_opt.x_min, "Grid start")->capture_default_str();
    model->add_option("--x-max", model_opt.x_max, "Grid end")->capture_default_str();
    model->add_option("--steps", model_opt.steps, "Grid point count")->capture_default_str();
    model->add_option("--out", model_opt.out_path, "Write curve CSV here instead of stdout");

    SynthOptions synth_opt;
    CLI::App* synth = app.add_subcommand("synth", "Render a ground-truth vibrato fixture");
    synth->add_option("--center", synth_opt.spec.f_center, "Tonal center, Hz")->capture_default_str();
    synth->add_option("--depth", synth_opt.spec.depth_cents, "Half excursion, cents")->capture_default_str();
    synth->add_option("--rate", synth_opt.spec.rate_hz, "Vibrato rate, Hz")->capture_default_str();
    synth->add_option("--duration", synth_opt.spec.duration_s, "Seconds")->capture_default_str();
    synth->add_option("--sample-rate", synth_opt.spec.sample_rate, "Hz")->capture_default_str();
    synth->add_option("--harmonics", synth_opt.spec.n_harmonics, "Harmonic count")->capture_default_str();
    synth->add_option("--drift", synth_opt.spec.drift_hz_per_s, "Center drift, Hz/s")->capture_default_str();
    synth->add_option("--noise", synth_opt.spec.noise_rms, "Noise RMS relative to signal")->capture_default_str();
    synth->add_option("--seed", synth_opt.spec.seed, "Noise seed")->capture_default_str();
    synth->add_option("--string-freq", synth_opt.string_freq,
                      "Open string for the truth file, Hz")->capture_default_str();
    synth->add_option("--out", synth_opt.out_path, "Output WAV path")->required();
    synth->add_option("--emit-truth", synth_opt.truth_path,
                      "Write ground-truth JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (analyze->parsed()) return cmd_analyze(analyze_opt);
    if (batch->parsed()) return cmd_batch(manifest_path, batch_out, batch_threads);
    if (fit->parsed()) return cmd_fit(fit_opt);
    if (model->parsed()) return cmd_model(model_opt);
    if (synth->parsed()) return cmd_synth(synth_opt);
    return kExitUsage;
}
