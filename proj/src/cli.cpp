#include "fwave/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "fwave/error.hpp"
#include "fwave/ingest.hpp"
#include "fwave/pipeline.hpp"
#include "fwave/report.hpp"
#include "fwave/synth.hpp"
#include "fwave/wavelet.hpp"

namespace fwave {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> logger() {
    static const std::shared_ptr<spdlog::logger> log = [] {
        auto l = spdlog::stderr_logger_mt("fwave");
        l->set_pattern("[%l] %v");
        return l;
    }();
    const char* env = std::getenv("FWAVE_LOG");
    log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return log;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw UsageError("invalid value '" + text + "' for " + key);
    }
    return value;
}

// Pipeline settings by kebab-case name. The same table serves the --config
// file and the command-line flags.
using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;

struct Setting {
    std::string name;
    std::string help;
    Setter apply;
};

template <typename T, typename Member>
Setter number_setter(Member member) {
    return [member](PipelineConfig& cfg, const std::string& key, const std::string& value) {
        std::invoke(member, cfg) = parse_number<T>(key, value);
    };
}

const std::vector<Setting>& pipeline_settings() {
    static const std::vector<Setting> table{
        {"powerline-hz", "mains frequency, Hz (50)", number_setter<double>([](PipelineConfig& c) -> double& { return c.preprocess.powerline_hz; })},
        {"powerline-mode", "swt or notch (swt)",
         [](PipelineConfig& c, const std::string& key, const std::string& value) {
             if (value == "swt") {
                 c.preprocess.powerline_mode = PowerlineMode::SwtShrinkage;
             } else if (value == "notch") {
                 c.preprocess.powerline_mode = PowerlineMode::Notch;
             } else {
                 throw UsageError("invalid value '" + value + "' for " + key + " (swt or notch)");
             }
         }},
        {"hp", "baseline highpass cutoff, Hz (0.5)", number_setter<double>([](PipelineConfig& c) -> double& { return c.preprocess.hp_cutoff_hz; })},
        {"lp", "lowpass cutoff, Hz (70)", number_setter<double>([](PipelineConfig& c) -> double& { return c.preprocess.lp_cutoff_hz; })},
        {"stopband-atten", "lowpass stopband attenuation, dB (40)",
         number_setter<double>([](PipelineConfig& c) -> double& { return c.preprocess.stopband_atten_db; })},
        {"rv", "phasor constant (0.5)", number_setter<double>([](PipelineConfig& c) -> double& { return c.rv; })},
        {"m-similar", "beats per QRST template (10)", number_setter<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.m_similar; })},
        {"segment-len", "segment length, s (1)", number_setter<double>([](PipelineConfig& c) -> double& { return c.segment_len_s; })},
        {"wavelet-levels", "SWT levels (8)", number_setter<int>([](PipelineConfig& c) -> int& { return c.wavelet_levels; })},
        {"rwe-scale", "scale used for RWE (7)", number_setter<int>([](PipelineConfig& c) -> int& { return c.rwe_scale; })},
        {"daf-low", "DAF band low edge, Hz (3)", number_setter<double>([](PipelineConfig& c) -> double& { return c.daf_band_low_hz; })},
        {"daf-high", "DAF band high edge, Hz (12)", number_setter<double>([](PipelineConfig& c) -> double& { return c.daf_band_high_hz; })},
        {"psd-window", "Welch window, s (2)", number_setter<double>([](PipelineConfig& c) -> double& { return c.psd.window_s; })},
        {"psd-overlap", "Welch overlap fraction (0.5)", number_setter<double>([](PipelineConfig& c) -> double& { return c.psd.overlap; })},
        {"psd-nfft", "FFT length (4096)", number_setter<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.psd.nfft; })},
    };
    return table;
}

const Setter& find_setting(const std::string& key) {
    for (const Setting& s : pipeline_settings()) {
        if (s.name == key) return s.apply;
    }
    throw UsageError("unknown setting '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        find_setting(key)(cfg, key, trim(line.substr(eq + 1)));
    }
}

// Flags and --config for every command that runs the pipeline.
struct PipelineFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value settings file")->check(CLI::ExistingFile);
        for (const Setting& s : pipeline_settings()) cmd->add_option("--" + s.name, values[s.name], s.help);
    }

    PipelineConfig resolve(CLI::App* cmd) const {
        PipelineConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        for (const Setting& s : pipeline_settings()) {
            if (cmd->count("--" + s.name) > 0) s.apply(cfg, "--" + s.name, values.at(s.name));
        }
        return cfg;
    }
};

std::string default_record_extension() { return ".txt"; }

fs::path sidecar_path(const fs::path& out, const std::string& suffix) {
    fs::path p = out;
    p.replace_extension();
    p += suffix;
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::string energies_csv(const FWaveSignal& fw, const PipelineConfig& cfg) {
    const SegmentSeries segs = segment_signal(fw, cfg.segment_len_s);
    SwtOptions options;
    options.levels = cfg.wavelet_levels;
    std::string csv = "segment";
    for (int j = 1; j <= cfg.wavelet_levels; ++j) csv += ",scale_" + std::to_string(j);
    csv += "\n";
    for (std::size_t i = 0; i < segs.segments.size(); ++i) {
        csv += std::to_string(i);
        for (double e : detail_energies(swt_decompose(segs.segments[i], options, fw.fs))) {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, round_sig6(e));
            csv += "," + std::string(buf, res.ptr);
        }
        csv += "\n";
    }
    return csv;
}

int cmd_analyze(const std::string& record_path, const std::string& csv_path, const std::string& energies_path,
                const PipelineConfig& cfg, std::ostream& out) {
    const EcgRecord record = read_record(record_path);
    logger()->info("analyze {} ({} samples at {} Hz)", record.record_id, record.samples.size(), record.fs);
    const FWaveSignal fw = extract_fwaves(record, cfg);
    FeatureSet features = compute_features(fw, cfg);
    features.record_id = record.record_id;
    out << to_json(features).dump(2) << "\n";
    if (!csv_path.empty()) write_text(csv_path, feature_csv_header() + "\n" + feature_csv_row(features) + "\n");
    if (!energies_path.empty()) write_text(energies_path, energies_csv(fw, cfg));
    return kExitOk;
}

int cmd_extract(const std::string& record_path, const fs::path& out_path, const PipelineConfig& cfg) {
    const EcgRecord record = read_record(record_path);
    RPeakList peaks;
    const FWaveSignal fw = extract_fwaves(record, cfg, peaks);

    EcgRecord result = record;
    result.samples = fw.samples;
    write_record(result, out_path);

    std::string csv = "r_index\n";
    for (std::size_t i : peaks.indices) csv += std::to_string(i) + "\n";
    write_text(sidecar_path(out_path, ".rpeaks.csv"), csv);
    logger()->info("extract-fwaves {}: {} beats", record.record_id, peaks.indices.size());
    return kExitOk;
}

struct RecordOutcome {
    std::optional<FeatureSet> features;
    std::string failure;
};

int cmd_cohort(const fs::path& records_dir, const fs::path& labels_path, const fs::path& out_path,
               unsigned jobs, const PipelineConfig& cfg) {
    const CohortLabels labels = read_labels(labels_path);
    if (!fs::is_directory(records_dir)) {
        throw Error(ErrorCode::IoFailure, records_dir.string() + " is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(records_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == default_record_extension()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<RecordOutcome> results(files.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            try {
                results[i].features = compute_feature_set(read_record(files[i]), cfg);
            } catch (const Error& e) {
                results[i].failure = e.what();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<FeatureSet> labelled;
    std::map<std::string, std::string> skipped;
    std::map<std::string, bool> seen;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string id = results[i].features ? results[i].features->record_id : files[i].stem().string();
        if (seen.count(id) > 0) throw Error(ErrorCode::DuplicateRecordId, "'" + id + "' in " + records_dir.string());
        seen[id] = true;
        if (!results[i].features) {
            skipped[id] = results[i].failure;
        } else if (labels.count(id) == 0) {
            skipped[id] = std::string(error_name(ErrorCode::UnlabeledRecord)) + ": no label in " +
                          labels_path.filename().string();
        } else {
            labelled.push_back(*results[i].features);
        }
    }
    for (const auto& [id, outcome] : labels) {
        if (seen.count(id) == 0) skipped[id] = "no record file";
    }
    for (const auto& [id, reason] : skipped) logger()->warn("skipped {}: {}", id, reason);

    CohortReport report = cohort_report(labelled, labels);
    for (const auto& [id, reason] : skipped) report.skipped.push_back({id, reason});

    write_text(out_path, to_json(report).dump(2) + "\n");
    for (const FeatureReport& f : report.features) {
        write_text(sidecar_path(out_path, ".roc_" + f.name + ".csv"), roc_csv(f));
    }
    logger()->info("cohort: {} records analysed, {} skipped", labelled.size(), report.skipped.size());
    return kExitOk;
}

json truth_json(const SynthRecord& r) {
    json fwaves = json::array();
    json envelope = json::array();
    for (double v : r.fwaves.samples) fwaves.push_back(round_sig6(v));
    for (double v : r.fwaves.envelope) envelope.push_back(round_sig6(v));
    return json{{"record_id", r.record.record_id}, {"daf_hz", round_sig6(r.daf_hz)},
                {"am_depth", round_sig6(r.am_depth)}, {"r_peaks", r.ventricular.r_peaks},
                {"fwaves", std::move(fwaves)}, {"envelope", std::move(envelope)}};
}

int cmd_synth(const fs::path& out_dir, const CohortDesign& design, const SynthSpec& spec) {
    if (design.n_sr == 0 || design.n_af == 0) throw UsageError("--n-sr and --n-af must be at least 1");
    try {
        validate(spec);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    fs::create_directories(out_dir);
    const SynthCohort cohort = gen_cohort(design, spec);
    for (const SynthRecord& r : cohort.records) {
        write_record(r.record, out_dir / (r.record.record_id + default_record_extension()));
        write_text(out_dir / (r.record.record_id + ".truth.json"), truth_json(r).dump() + "\n");
    }
    write_labels(cohort.labels, out_dir / "labels.csv");
    logger()->info("synth: wrote {} records to {}", cohort.records.size(), out_dir.string());
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"AF f-wave analysis: feature extraction, cohort statistics and synthetic data"};
    app.require_subcommand(1);

    std::string record_path;
    std::string out_path;
    std::string records_dir;
    std::string labels_path;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    PipelineFlags analyze_flags;
    CLI::App* analyze = app.add_subcommand("analyze", "Print the features of one record as JSON");
    std::string csv_path;
    std::string energies_path;
    analyze->add_option("record", record_path, "record file")->required();
    analyze->add_option("--csv", csv_path, "also write the features as a CSV row");
    analyze->add_option("--dump-energies", energies_path, "write per-segment detail energies as CSV");
    analyze_flags.attach(analyze);

    PipelineFlags cohort_flags;
    CLI::App* cohort = app.add_subcommand("cohort", "Compare features between outcome groups");
    cohort->add_option("--records", records_dir, "directory of record files (*.txt)")->required();
    cohort->add_option("--labels", labels_path, "labels CSV")->required();
    cohort->add_option("--out", out_path, "report JSON; ROC CSVs are written beside it")->required();
    cohort->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    cohort_flags.attach(cohort);

    PipelineFlags extract_flags;
    CLI::App* extract = app.add_subcommand("extract-fwaves", "Write the QRST-cancelled signal of one record");
    extract->add_option("record", record_path, "record file")->required();
    extract->add_option("--out", out_path, "output record; R-peaks go to <out>.rpeaks.csv")->required();
    extract_flags.attach(extract);

    SynthSpec spec;
    CohortDesign design;
    CLI::App* synth = app.add_subcommand("synth", "Generate a labelled synthetic cohort");
    synth->add_option("--out-dir", out_path, "output directory")->required();
    synth->add_option("--n-sr", design.n_sr, "records that maintained sinus rhythm");
    synth->add_option("--n-af", design.n_af, "records that relapsed to AF");
    synth->add_option("--separation", design.separation, "gap between the AM depth ranges");
    synth->add_flag("--identical-ranges", design.identical_ranges, "draw both groups from one AM depth range");
    synth->add_option("--seed", design.seed, "master seed");
    synth->add_option("--duration", spec.duration_s, "seconds");
    synth->add_option("--fs", spec.fs, "sampling rate, Hz");
    synth->add_option("--daf", spec.daf_hz, "f-wave fundamental, Hz");
    synth->add_option("--fwave-amp", spec.fwave_amp_uv, "f-wave RMS, uV");
    synth->add_option("--am-period", spec.fwave_am_period_s, "envelope period, s");
    synth->add_option("--mean-rr", spec.mean_rr_s, "mean RR interval, s");
    synth->add_option("--rr-jitter", spec.rr_jitter_frac, "RR jitter fraction");
    synth->add_option("--qrs-amp", spec.qrs_amp_uv, "QRS amplitude, uV");
    synth->add_option("--noise-rms", spec.noise_rms_uv, "white noise RMS, uV");
    synth->add_option("--powerline-amp", spec.powerline_amp_uv, "50 Hz amplitude, uV");
    synth->add_option("--baseline-amp", spec.baseline_amp_uv, "0.2 Hz drift amplitude, uV");

    std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*analyze) return cmd_analyze(record_path, csv_path, energies_path, analyze_flags.resolve(analyze), out);
        if (*extract) return cmd_extract(record_path, out_path, extract_flags.resolve(extract));
        if (*cohort) return cmd_cohort(records_dir, labels_path, out_path, jobs, cohort_flags.resolve(cohort));
        return cmd_synth(out_path, design, spec);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace fwave
