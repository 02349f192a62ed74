#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asymsep/asymsep.hpp"

namespace asymsep::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Everything a run needs, resolved from flags > config file > defaults.
struct RunConfig {
    std::string subcommand;

    // window scheme
    double analysis_ms = 32.0;
    double synthesis_ms = 8.0;
    std::size_t dead_zone = 0;
    std::string scheme = "asym"; // sym | asym
    double rate = 8000.0;

    // masking / evaluation
    std::string mask = "irm"; // ibm | irm | unity | file:<path>
    double tau = 0.1;
    std::size_t filter_len = 512;
    bool permute = false;

    // inputs
    std::vector<std::string> sources;
    std::vector<std::string> estimates;
    std::vector<std::string> refs;
    std::string input;
    std::string corpus_dir;
    std::string lengths_ms = "8,16,32";
    std::array<double, 2> gains_db{0.0, 0.0};
    double trim_db = -40.0;

    // corpus generation
    std::size_t count = 30;
    std::uint64_t seed = 1;
    double duration_s = 1.6;

    // outputs
    std::string out;
    bool pcm16 = false;
    bool save_masks = false;
    double verify_seconds = 1.0;
};

inline WindowPair pair_from_config(const RunConfig& cfg) {
    if (cfg.scheme != "sym" && cfg.scheme != "asym")
        throw ConfigError("scheme must be 'sym' or 'asym'");
    SchemeSpec scheme{cfg.scheme == "sym" ? WindowScheme::symmetric : WindowScheme::asymmetric,
                      cfg.analysis_ms, cfg.synthesis_ms, cfg.dead_zone};
    if (scheme.scheme == WindowScheme::symmetric && cfg.analysis_ms != cfg.synthesis_ms)
        throw ConfigError("symmetric scheme requires analysis-ms == synthesis-ms");
    return make_scheme_pair(scheme, cfg.rate);
}

inline MaskKind mask_kind_from_name(const std::string& name) {
    if (name == "ibm") return MaskKind::binary;
    if (name == "irm") return MaskKind::ratio;
    throw ConfigError("mask must be ibm, irm, unity or file:<path>, got '" + name + "'");
}

inline std::vector<double> parse_lengths(const std::string& csv) {
    std::vector<double> lengths;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        lengths.push_back(std::stod(item));
    }
    if (lengths.empty()) throw ConfigError("no analysis lengths given");
    return lengths;
}

inline void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

// ---------------------------------------------------------------------------
// windows: emit a window pair as CSV (one row per sample index) and JSON
// ---------------------------------------------------------------------------

inline int cmd_windows(const RunConfig& cfg) {
    const WindowPair pair = pair_from_config(cfg);
    const std::string prefix = cfg.out.empty() ? "windows" : cfg.out;
    ensure_parent_dir(prefix);

    const std::string csv_path = prefix + ".csv";
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write " + csv_path);
    csv << "index,analysis,synthesis\n";
    csv.precision(17);
    for (std::size_t n = 0; n < pair.analysis.size(); ++n)
        csv << n << ',' << pair.analysis[n] << ',' << pair.synthesis[n] << '\n';

    json j;
    j["scheme"] = cfg.scheme;
    j["analysis_ms"] = cfg.analysis_ms;
    j["synthesis_ms"] = cfg.synthesis_ms;
    j["sample_rate"] = cfg.rate;
    j["analysis_len"] = pair.config.analysis_len;
    j["synthesis_len"] = pair.config.synthesis_len;
    j["hop"] = pair.config.hop;
    j["dead_zone"] = pair.config.dead_zone;
    j["analysis"] = pair.analysis;
    j["synthesis"] = pair.synthesis;
    const std::string json_path = prefix + ".json";
    std::ofstream js(json_path);
    if (!js) throw DataError("cannot write " + json_path);
    js << j.dump(2) << '\n';

    std::cout << "wrote " << csv_path << " and " << json_path << " ("
              << pair.config.analysis_len << " samples)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify: report the measured round-trip error against the 1e-10 contract
// ---------------------------------------------------------------------------

inline int cmd_verify(const RunConfig& cfg) {
    const WindowPair pair = pair_from_config(cfg);
    const std::size_t K = pair.config.analysis_len;
    const auto requested = static_cast<std::size_t>(std::llround(cfg.verify_seconds * cfg.rate));
    const std::size_t test_len = std::max(requested, 4 * K);
    const double err = verify_perfect_reconstruction(pair, test_len);
    const bool pass = err < 1e-10;
    std::cout << "window-only round trip over " << test_len << " samples\n"
              << "max steady-state error: " << err << "\n"
              << (pass ? "PASS" : "FAIL") << " (threshold 1e-10)\n";
    return pass ? 0 : 2;
}

// ---------------------------------------------------------------------------
// mix: build a two-speaker mixture with silence trimming
// ---------------------------------------------------------------------------

inline int cmd_mix(const RunConfig& cfg) {
    if (cfg.sources.size() != 2) throw ConfigError("mix needs exactly two --sources");
    MixtureSpec spec;
    spec.source_paths = {cfg.sources[0], cfg.sources[1]};
    spec.gains_db = cfg.gains_db;
    spec.trim_threshold_db = cfg.trim_db;
    const MixtureData mix = make_mixture(spec);

    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    fs::create_directories(dir);
    const WavFormat fmt = cfg.pcm16 ? WavFormat::pcm16 : WavFormat::float32;
    write_wav((dir / "mixture.wav").string(), mix.mixture, mix.sample_rate, fmt);
    write_wav((dir / "src1.wav").string(), mix.sources[0], mix.sample_rate, fmt);
    write_wav((dir / "src2.wav").string(), mix.sources[1], mix.sample_rate, fmt);

    json j;
    j["sources"] = cfg.sources;
    j["gains_db"] = cfg.gains_db;
    j["trim_db"] = cfg.trim_db;
    j["sample_rate"] = mix.sample_rate;
    j["samples"] = mix.mixture.size();
    std::ofstream js(dir / "mix.json");
    js << j.dump(2) << '\n';

    std::cout << "wrote mixture of " << mix.mixture.size() << " samples to " << dir.string()
              << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// separate: run the streaming engine with the chosen mask estimator
// ---------------------------------------------------------------------------

inline int cmd_separate(const RunConfig& cfg) {
    const WindowPair pair = pair_from_config(cfg);
    const WavData mix = read_wav(cfg.input);
    if (mix.sample_rate != cfg.rate)
        throw DataError("input rate " + std::to_string(mix.sample_rate) +
                        " does not match --rate; pass the file's rate explicitly");

    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    fs::create_directories(dir);
    const WavFormat fmt = cfg.pcm16 ? WavFormat::pcm16 : WavFormat::float32;

    auto run_stream = [&](MaskEstimator estimator, const std::string& name) {
        StreamProcessor stream(pair, std::move(estimator));
        stream.set_warning_handler(
            [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; });
        std::vector<double> out = stream.process(mix.samples);
        std::vector<double> tail = stream.flush();
        out.insert(out.end(), tail.begin(), tail.end());
        write_wav((dir / name).string(), out, cfg.rate, fmt);
        std::cout << "wrote " << (dir / name).string() << " (latency "
                  << stream.latency_samples() << " samples)\n";
    };

    if (cfg.mask == "unity") {
        run_stream(unity_estimator(), "est.wav");
    } else if (cfg.mask.starts_with("file:")) {
        const Mask mask = load_mask_binary(cfg.mask.substr(5));
        run_stream(precomputed_mask_estimator(mask), "est.wav");
    } else {
        const MaskKind kind = mask_kind_from_name(cfg.mask);
        if (cfg.refs.size() != 2)
            throw ConfigError("oracle masks need exactly two --refs source files");
        std::vector<Spectrogram> ref_specs;
        for (const std::string& path : cfg.refs) {
            const WavData ref = read_wav(path);
            if (ref.sample_rate != cfg.rate) throw DataError("reference rate mismatch: " + path);
            if (ref.samples.size() != mix.samples.size())
                throw DataError("reference not aligned with mixture: " + path);
            ref_specs.push_back(analyze(ref.samples, pair));
        }
        for (std::size_t i = 0; i < ref_specs.size(); ++i) {
            Mask mask = kind == MaskKind::binary ? ideal_binary_mask(ref_specs, i)
                                                 : ideal_ratio_mask(ref_specs, i);
            if (cfg.save_masks)
                save_mask_binary(mask, (dir / ("mask" + std::to_string(i + 1) + ".msk")).string());
            run_stream(precomputed_mask_estimator(std::move(mask)),
                       "est" + std::to_string(i + 1) + ".wav");
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// eval: BSS-eval scores, printed in the result-table layout
// ---------------------------------------------------------------------------

inline void print_score_table(const std::string& window_label, const std::string& pair_label,
                              const std::vector<SeparationScores>& scores) {
    std::printf("%-8s %-10s %8s %8s %8s\n", "Window", "(A, S)", "SDR", "SIR", "SAR");
    double sdr = 0.0, sir = 0.0, sar = 0.0;
    for (const SeparationScores& s : scores) {
        std::printf("%-8s %-10s %8.2f %8.2f %8.2f\n", window_label.c_str(), pair_label.c_str(),
                    s.sdr, s.sir, s.sar);
        sdr += s.sdr;
        sir += s.sir;
        sar += s.sar;
    }
    const auto n = static_cast<double>(scores.size());
    if (scores.size() > 1)
        std::printf("%-8s %-10s %8.2f %8.2f %8.2f  (mean)\n", window_label.c_str(),
                    pair_label.c_str(), sdr / n, sir / n, sar / n);
}

inline int cmd_eval(const RunConfig& cfg) {
    if (cfg.estimates.empty() || cfg.refs.empty())
        throw ConfigError("eval needs --estimates and --refs");
    std::vector<std::vector<double>> estimates, refs;
    double rate = 0.0;
    auto load = [&rate](const std::string& path, std::vector<std::vector<double>>& into) {
        WavData wav = read_wav(path);
        if (rate == 0.0)
            rate = wav.sample_rate;
        else if (wav.sample_rate != rate)
            throw DataError("sample rate mismatch: " + path);
        into.push_back(std::move(wav.samples));
    };
    for (const auto& p : cfg.estimates) load(p, estimates);
    for (const auto& p : cfg.refs) load(p, refs);

    std::vector<SeparationScores> scores;
    std::vector<std::size_t> permutation;
    if (cfg.permute) {
        PermutationScores ps = permute_and_score(estimates, refs, cfg.filter_len);
        scores = ps.scores;
        permutation = ps.permutation;
    } else {
        scores = bss_eval(estimates, refs, cfg.filter_len);
    }

    const std::string window_label =
        cfg.scheme == "sym" ? "Sym." : (cfg.scheme == "asym" ? "Asym." : "-");
    char pair_label[32];
    std::snprintf(pair_label, sizeof pair_label, "(%g, %g)", cfg.analysis_ms, cfg.synthesis_ms);
    print_score_table(window_label, pair_label, scores);
    if (!permutation.empty()) {
        std::cout << "permutation:";
        for (std::size_t p : permutation) std::cout << ' ' << p;
        std::cout << '\n';
    }

    if (!cfg.out.empty()) {
        ensure_parent_dir(cfg.out);
        json j;
        j["window"] = window_label;
        j["analysis_ms"] = cfg.analysis_ms;
        j["synthesis_ms"] = cfg.synthesis_ms;
        j["filter_len"] = cfg.filter_len;
        json rows = json::array();
        for (std::size_t i = 0; i < scores.size(); ++i) {
            rows.push_back({{"source", i + 1},
                            {"sdr", scores[i].sdr},
                            {"sir", scores[i].sir},
                            {"sar", scores[i].sar}});
        }
        j["scores"] = rows;
        if (!permutation.empty()) j["permutation"] = permutation;
        std::ofstream js(cfg.out + ".json");
        js << j.dump(2) << '\n';
        std::ofstream csv(cfg.out + ".csv");
        csv << "source,sdr,sir,sar\n";
        csv.precision(12);
        for (std::size_t i = 0; i < scores.size(); ++i)
            csv << i + 1 << ',' << scores[i].sdr << ',' << scores[i].sir << ','
                << scores[i].sar << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep: Fig.-4-style analysis-length sweep over a corpus directory
// ---------------------------------------------------------------------------

inline void write_run_config(const fs::path& path, const RunConfig& cfg) {
    std::ofstream out(path);
    out << "corpus=" << cfg.corpus_dir << '\n'
        << "lengths-ms=" << cfg.lengths_ms << '\n'
        << "synthesis-ms=" << cfg.synthesis_ms << '\n'
        << "mask=" << cfg.mask << '\n'
        << "tau=" << cfg.tau << '\n'
        << "filter-len=" << cfg.filter_len << '\n'
        << "rate=" << cfg.rate << '\n';
}

inline int cmd_sweep(const RunConfig& cfg) {
    double rate = 0.0;
    const std::vector<SourcePair> corpus = load_corpus(cfg.corpus_dir, rate);
    if (cfg.rate > 0.0 && rate != cfg.rate)
        throw DataError("corpus rate " + std::to_string(rate) + " does not match --rate");
    const MaskKind kind = mask_kind_from_name(cfg.mask);
    const std::vector<double> lengths = parse_lengths(cfg.lengths_ms);

    const std::vector<ExperimentResult> results = sweep_analysis_lengths(
        corpus, lengths, cfg.synthesis_ms, kind, rate, cfg.filter_len, cfg.tau);

    const fs::path dir = cfg.out.empty() ? fs::path("sweep_out") : fs::path(cfg.out);
    fs::create_directories(dir);
    write_results_csv((dir / "results.csv").string(), results);
    write_sweep_csv((dir / "sweep.csv").string(), results);
    write_run_config(dir / "sweep_config.cfg", cfg);

    json summary;
    summary["mode"] = "Oracle";
    summary["mask"] = cfg.mask;
    summary["sample_rate"] = rate;
    summary["mixtures"] = corpus.size();
    summary["filter_len"] = cfg.filter_len;
    json rows = json::array();
    for (const ExperimentResult& r : results) {
        rows.push_back({{"window", r.scheme.label()},
                        {"analysis_ms", r.scheme.analysis_ms},
                        {"synthesis_ms", r.scheme.synthesis_ms},
                        {"sdr", r.mean_sdr},
                        {"sir", r.mean_sir},
                        {"sar", r.mean_sar},
                        {"overlap", r.mean_overlap}});
    }
    summary["rows"] = rows;
    std::ofstream js(dir / "summary.json");
    js << summary.dump(2) << '\n';

    std::printf("%-8s %-10s %8s %8s %8s %10s\n", "Window", "(A, S)", "SDR", "SIR", "SAR",
                "overlap");
    for (const ExperimentResult& r : results) {
        char pair_label[32];
        std::snprintf(pair_label, sizeof pair_label, "(%g, %g)", r.scheme.analysis_ms,
                      r.scheme.synthesis_ms);
        std::printf("%-8s %-10s %8.2f %8.2f %8.2f %9.1f%%\n", r.scheme.label().c_str(),
                    pair_label, r.mean_sdr, r.mean_sir, r.mean_sar, 100.0 * r.mean_overlap);
    }
    std::cout << "results in " << dir.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// corpus: generate the self-contained synthetic two-voice corpus
// ---------------------------------------------------------------------------

inline int cmd_corpus(const RunConfig& cfg) {
    CorpusParams params;
    params.count = cfg.count;
    params.sample_rate = cfg.rate;
    params.duration_s = cfg.duration_s;
    params.seed = cfg.seed;
    const std::vector<SourcePair> corpus = generate_corpus(params);
    const std::string dir = cfg.out.empty() ? "corpus" : cfg.out;
    write_corpus(dir, corpus, params.sample_rate);
    std::cout << "wrote " << corpus.size() << " source pairs to " << dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// argument wiring
// ---------------------------------------------------------------------------

inline void add_window_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--analysis-ms", cfg.analysis_ms, "Analysis window length in ms");
    sub->add_option("--synthesis-ms", cfg.synthesis_ms, "Synthesis window length in ms");
    sub->add_option("--dead-zone", cfg.dead_zone, "Leading zeros of the analysis window");
    sub->add_option("--scheme", cfg.scheme, "Window scheme: sym or asym");
    sub->add_option("--rate", cfg.rate, "Sample rate in Hz");
}

inline int run(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Low-latency mask-based source separation with asymmetric windows"};
    app.require_subcommand(1);

    CLI::App* windows = app.add_subcommand("windows", "Emit a window pair as CSV and JSON");
    add_window_options(windows, cfg);
    windows->add_option("--out", cfg.out, "Output prefix (.csv/.json appended)");
    windows->set_config("--config");

    CLI::App* verify = app.add_subcommand("verify", "Check perfect reconstruction");
    add_window_options(verify, cfg);
    verify->add_option("--seconds", cfg.verify_seconds, "Test signal duration");
    verify->set_config("--config");

    CLI::App* mix = app.add_subcommand("mix", "Trim and sum two sources into a mixture");
    mix->add_option("--sources", cfg.sources, "Two source WAV files")->expected(2)->required();
    mix->add_option("--gains", cfg.gains_db, "Per-source gain offsets in dB");
    mix->add_option("--trim-db", cfg.trim_db, "Leading-silence threshold, dB below peak");
    mix->add_option("--out", cfg.out, "Output directory");
    mix->add_flag("--pcm16", cfg.pcm16, "Write 16-bit PCM instead of 32-bit float");
    mix->set_config("--config");

    CLI::App* separate = app.add_subcommand("separate", "Separate a mixture with the streaming engine");
    add_window_options(separate, cfg);
    separate->add_option("--input", cfg.input, "Mixture WAV")->required();
    separate->add_option("--refs", cfg.refs, "Reference sources (for oracle masks)")->expected(2);
    separate->add_option("--mask", cfg.mask, "ibm | irm | unity | file:<path>");
    separate->add_option("--out", cfg.out, "Output directory");
    separate->add_flag("--pcm16", cfg.pcm16, "Write 16-bit PCM instead of 32-bit float");
    separate->add_flag("--save-masks", cfg.save_masks, "Also write oracle masks as .msk files");
    separate->set_config("--config");

    CLI::App* eval = app.add_subcommand("eval", "Score estimates against references (BSS-eval)");
    add_window_options(eval, cfg);
    eval->add_option("--estimates", cfg.estimates, "Estimated source WAVs")->required();
    eval->add_option("--refs", cfg.refs, "Reference source WAVs")->required();
    eval->add_option("--filter-len", cfg.filter_len, "Projection filter length in taps");
    eval->add_flag("--permute", cfg.permute, "Search the best estimate/reference assignment");
    eval->add_option("--out", cfg.out, "Output prefix (.csv/.json appended)");
    eval->set_config("--config");

    CLI::App* sweep = app.add_subcommand("sweep", "Oracle sweep over analysis window lengths");
    sweep->add_option("--corpus", cfg.corpus_dir, "Corpus directory (mix*_src{1,2}.wav)")
        ->required();
    sweep->add_option("--lengths-ms", cfg.lengths_ms, "Comma-separated analysis lengths");
    sweep->add_option("--synthesis-ms", cfg.synthesis_ms, "Fixed synthesis length in ms");
    sweep->add_option("--mask", cfg.mask, "ibm or irm");
    sweep->add_option("--tau", cfg.tau, "Overlap threshold");
    sweep->add_option("--filter-len", cfg.filter_len, "BSS-eval filter length");
    sweep->add_option("--rate", cfg.rate, "Expected corpus sample rate (0 = accept)");
    sweep->add_option("--out", cfg.out, "Output directory");
    sweep->set_config("--config");

    CLI::App* corpus = app.add_subcommand("corpus", "Generate the synthetic two-voice corpus");
    corpus->add_option("--count", cfg.count, "Number of source pairs");
    corpus->add_option("--seed", cfg.seed, "Corpus seed");
    corpus->add_option("--rate", cfg.rate, "Sample rate in Hz");
    corpus->add_option("--duration-s", cfg.duration_s, "Voiced duration per source");
    corpus->add_option("--out", cfg.out, "Output directory");
    corpus->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (windows->parsed()) return cmd_windows(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (mix->parsed()) return cmd_mix(cfg);
        if (separate->parsed()) return cmd_separate(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (corpus->parsed()) return cmd_corpus(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace asymsep::cli
