// nsaqa command-line front-end. Talks to the engine exclusively through the
// C API in nsaqa.h; all file handling lives here.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nsaqa.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitInternal = 3;

struct StringDeleter {
    void operator()(char* p) const { nsaqa_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct StreamDeleter {
    void operator()(nsaqa_stream* p) const { nsaqa_stream_free(p); }
};
using OwnedStream = std::unique_ptr<nsaqa_stream, StreamDeleter>;

struct ConfigDeleter {
    void operator()(nsaqa_config* p) const { nsaqa_config_free(p); }
};
using OwnedConfig = std::unique_ptr<nsaqa_config, ConfigDeleter>;

struct ReferenceDeleter {
    void operator()(nsaqa_reference* p) const { nsaqa_reference_free(p); }
};
using OwnedReference = std::unique_ptr<nsaqa_reference, ReferenceDeleter>;

struct ReportDeleter {
    void operator()(nsaqa_report* p) const { nsaqa_report_free(p); }
};
using OwnedReport = std::unique_ptr<nsaqa_report, ReportDeleter>;

struct EvaluatorDeleter {
    void operator()(nsaqa_evaluator* p) const { nsaqa_evaluator_free(p); }
};
using OwnedEvaluator = std::unique_ptr<nsaqa_evaluator, EvaluatorDeleter>;

class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

[[noreturn]] void fail(int code, const std::string& message) {
    throw CliError(code, message);
}

int code_of(nsaqa_status status) {
    switch (status) {
        case NSAQA_OK: return kExitOk;
        case NSAQA_ERR_INPUT: return kExitInput;
        case NSAQA_ERR_ANALYSIS: return kExitAnalysis;
        case NSAQA_ERR_INTERNAL: return kExitInternal;
    }
    return kExitInternal;
}

// err must be bound by reference: it is filled during the call expression
void check(nsaqa_status status, char*& err, const std::string& what) {
    if (status == NSAQA_OK) return;
    OwnedString owned(err);
    err = nullptr;
    fail(code_of(status), what + ": " + (owned ? owned.get() : "unknown error"));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitInput, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(kExitInput, "cannot write " + path.string());
    out << data;
    if (!out) fail(kExitInput, "short write to " + path.string());
}

OwnedConfig make_config(const std::vector<std::string>& set_flags) {
    OwnedConfig cfg(nsaqa_config_new());
    if (!cfg) fail(kExitInternal, "out of memory");

    auto apply = [&](const std::string& key, const std::string& value,
                     const std::string& origin) {
        char* err = nullptr;
        check(nsaqa_config_set(cfg.get(), key.c_str(), value.c_str(), &err), err, origin);
    };

    // NSAQA_CONFIG points at a key=value file; explicit --set flags override it
    if (const char* env = std::getenv("NSAQA_CONFIG")) {
        std::ifstream in(env);
        if (!in) fail(kExitInput, std::string("NSAQA_CONFIG: cannot open ") + env);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                fail(kExitInput, std::string("NSAQA_CONFIG line ") +
                                     std::to_string(line_no) + ": expected key=value");
            apply(line.substr(0, eq), line.substr(eq + 1), "NSAQA_CONFIG");
        }
    }
    for (const std::string& flag : set_flags) {
        const size_t eq = flag.find('=');
        if (eq == std::string::npos)
            fail(kExitInput, "--set expects key=value, got '" + flag + "'");
        apply(flag.substr(0, eq), flag.substr(eq + 1), "--set");
    }
    return cfg;
}

OwnedStream parse_stream_file(const fs::path& path) {
    const std::string data = read_file(path);
    nsaqa_stream* raw = nullptr;
    char* err = nullptr;
    check(nsaqa_stream_parse(data.data(), data.size(), &raw, &err), err, path.string());
    return OwnedStream(raw);
}

std::vector<fs::path> stream_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) fail(kExitInput, dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_analyze(const std::string& stream_path, const std::string& ref_path,
                const std::string& out_path, const std::string& weights_path,
                const std::string& templates_path,
                const std::vector<std::string>& set_flags) {
    OwnedConfig cfg = make_config(set_flags);
    OwnedStream stream = parse_stream_file(stream_path);

    const std::string ref_data = read_file(ref_path);
    nsaqa_reference* ref_raw = nullptr;
    char* err = nullptr;
    check(nsaqa_reference_parse(ref_data.data(), ref_data.size(), &ref_raw, &err), err,
          ref_path);
    OwnedReference ref(ref_raw);

    std::string weights_data, templates_data;
    if (!weights_path.empty()) weights_data = read_file(weights_path);
    if (!templates_path.empty()) templates_data = read_file(templates_path);

    nsaqa_report* report_raw = nullptr;
    check(nsaqa_analyze(stream.get(), ref.get(), cfg.get(),
                        weights_path.empty() ? nullptr : weights_data.c_str(),
                        templates_path.empty() ? nullptr : templates_data.c_str(),
                        &report_raw, &err),
          err, stream_path);
    OwnedReport report(report_raw);

    char* html = nullptr;
    size_t html_len = 0;
    check(nsaqa_report_html(report.get(), &html, &html_len, &err), err, "render");
    OwnedString html_owned(html);
    char* result = nullptr;
    size_t result_len = 0;
    check(nsaqa_report_json(report.get(), &result, &result_len, &err), err, "render");
    OwnedString result_owned(result);

    fs::path html_path(out_path);
    fs::path json_path(out_path);
    if (json_path.extension() == ".html") json_path.replace_extension(".json");
    else json_path += ".json";
    write_file(html_path, std::string(html, html_len));
    write_file(json_path, std::string(result, result_len));

    std::printf("%.1f\n", nsaqa_report_overall(report.get()));
    return kExitOk;
}

int cmd_recognize(const std::string& stream_path, const std::vector<std::string>& set_flags,
                  bool segment_instead) {
    OwnedConfig cfg = make_config(set_flags);
    OwnedStream stream = parse_stream_file(stream_path);
    char* out = nullptr;
    char* err = nullptr;
    if (segment_instead)
        check(nsaqa_segment_json(stream.get(), cfg.get(), &out, &err), err, stream_path);
    else
        check(nsaqa_recognize_json(stream.get(), cfg.get(), &out, &err), err, stream_path);
    OwnedString owned(out);
    std::fputs(owned.get(), stdout);
    return kExitOk;
}

int cmd_build_ref(const std::string& corpus_dir, const std::string& out_path,
                  const std::string& provenance, int threads,
                  const std::vector<std::string>& set_flags) {
    OwnedConfig cfg = make_config(set_flags);
    const std::vector<fs::path> files = stream_files(corpus_dir);
    if (files.empty()) fail(kExitInput, "no .jsonl streams in " + corpus_dir);

    std::vector<OwnedStream> streams;
    std::vector<const nsaqa_stream*> raw;
    streams.reserve(files.size());
    for (const auto& file : files) {
        streams.push_back(parse_stream_file(file));
        raw.push_back(streams.back().get());
    }
    const std::string prov =
        provenance.empty() ? fs::path(corpus_dir).filename().string() : provenance;

    nsaqa_reference* ref_raw = nullptr;
    char* err = nullptr;
    check(nsaqa_reference_build(raw.data(), raw.size(), cfg.get(), prov.c_str(), threads,
                                &ref_raw, &err),
          err, corpus_dir);
    OwnedReference ref(ref_raw);

    char* text = nullptr;
    size_t len = 0;
    check(nsaqa_reference_serialize(ref.get(), &text, &len, &err), err, out_path);
    OwnedString owned(text);
    write_file(out_path, std::string(text, len));
    std::fprintf(stderr, "reference built from %zu streams -> %s\n", raw.size(),
                 out_path.c_str());
    return kExitOk;
}

int cmd_synth(std::int64_t n, std::uint64_t seed, const std::string& out_dir, double noise,
              double dropout) {
    if (n < 1) fail(kExitInput, "synth: --n must be at least 1");
    fs::create_directories(out_dir);
    for (std::int64_t i = 0; i < n; ++i) {
        nsaqa_stream* stream_raw = nullptr;
        char* gt_json = nullptr;
        char* err = nullptr;
        check(nsaqa_synth_sample(seed, static_cast<std::uint64_t>(i), noise, dropout,
                                 &stream_raw, &gt_json, &err),
              err, "synth");
        OwnedStream stream(stream_raw);
        OwnedString gt(gt_json);

        char* text = nullptr;
        size_t len = 0;
        check(nsaqa_stream_serialize(stream.get(), &text, &len, &err), err, "synth");
        OwnedString owned(text);

        const std::string base = nsaqa_stream_clip_id(stream.get());
        write_file(fs::path(out_dir) / (base + ".jsonl"), std::string(text, len));
        write_file(fs::path(out_dir) / (base + ".gt.json"), gt.get());
    }
    std::fprintf(stderr, "wrote %lld stream/ground-truth pairs to %s\n",
                 static_cast<long long>(n), out_dir.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& corpus_dir, const std::vector<std::string>& set_flags) {
    OwnedConfig cfg = make_config(set_flags);
    const std::vector<fs::path> files = stream_files(corpus_dir);
    if (files.empty()) fail(kExitInput, "no .jsonl streams in " + corpus_dir);

    OwnedEvaluator ev(nsaqa_evaluator_new(cfg.get()));
    if (!ev) fail(kExitInternal, "out of memory");
    for (const auto& file : files) {
        fs::path gt_path = file;
        gt_path.replace_extension(); // drop .jsonl
        gt_path += ".gt.json";
        if (!fs::exists(gt_path))
            fail(kExitInput, "missing ground truth " + gt_path.string());
        OwnedStream stream = parse_stream_file(file);
        const std::string gt = read_file(gt_path);
        char* err = nullptr;
        check(nsaqa_evaluator_add(ev.get(), stream.get(), gt.c_str(), &err), err,
              file.string());
    }
    char* out = nullptr;
    char* err = nullptr;
    check(nsaqa_evaluator_summary_json(ev.get(), &out, &err), err, "eval");
    OwnedString owned(out);
    std::fputs(owned.get(), stdout);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rules-based analysis of platform dives from symbol streams"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nsaqa_version());

    std::vector<std::string> set_flags;
    int threads = 1;
    app.add_option("--set", set_flags, "Analyzer config override, key=value (repeatable)")
        ->take_all();
    app.add_option("--threads", threads, "Worker threads for corpus commands");

    auto* analyze = app.add_subcommand("analyze", "Full analysis: report HTML + JSON");
    analyze->fallthrough();
    std::string stream_path, ref_path, out_path, weights_path, templates_path;
    analyze->add_option("stream", stream_path, "Symbol-stream .jsonl file")->required();
    analyze->add_option("--reference", ref_path, "Reference distribution JSON")->required();
    analyze->add_option("--out", out_path, "Output HTML path")->required();
    analyze->add_option("--weights", weights_path, "Aspect weight profile JSON");
    analyze->add_option("--templates", templates_path, "Sentence template library JSON");

    auto* recognize = app.add_subcommand("recognize", "Print the recognized dive as JSON");
    recognize->fallthrough();
    std::string rec_stream;
    recognize->add_option("stream", rec_stream, "Symbol-stream .jsonl file")->required();

    auto* segment = app.add_subcommand("segment", "Print the phase segmentation as JSON");
    segment->fallthrough();
    std::string seg_stream;
    segment->add_option("stream", seg_stream, "Symbol-stream .jsonl file")->required();

    auto* build_ref = app.add_subcommand("build-ref", "Build a reference distribution");
    build_ref->fallthrough();
    std::string corpus_dir, ref_out, provenance;
    build_ref->add_option("corpus", corpus_dir, "Directory of .jsonl streams")->required();
    build_ref->add_option("--out", ref_out, "Output reference JSON path")->required();
    build_ref->add_option("--provenance", provenance, "Provenance note (default: dir name)");

    auto* synth = app.add_subcommand("synth", "Generate synthetic dives with ground truth");
    synth->fallthrough();
    std::int64_t n = 0;
    std::uint64_t seed = 7;
    std::string out_dir;
    double noise = 0.0, dropout = 0.0;
    synth->add_option("--n", n, "Number of dives")->required();
    synth->add_option("--seed", seed, "Corpus seed");
    synth->add_option("--out-dir", out_dir, "Output directory")->required();
    synth->add_option("--noise", noise, "Per-joint Gaussian pixel noise sigma");
    synth->add_option("--dropout", dropout, "Per-frame pose dropout probability");

    auto* eval = app.add_subcommand("eval", "Accuracy and AIoU against ground truth");
    eval->fallthrough();
    std::string eval_dir;
    eval->add_option("corpus", eval_dir, "Directory of .jsonl + .gt.json pairs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*analyze)
            return cmd_analyze(stream_path, ref_path, out_path, weights_path,
                               templates_path, set_flags);
        if (*recognize) return cmd_recognize(rec_stream, set_flags, false);
        if (*segment) return cmd_recognize(seg_stream, set_flags, true);
        if (*build_ref)
            return cmd_build_ref(corpus_dir, ref_out, provenance, threads, set_flags);
        if (*synth) return cmd_synth(n, seed, out_dir, noise, dropout);
        if (*eval) return cmd_eval(eval_dir, set_flags);
    } catch (const CliError& e) {
        std::fprintf(stderr, "nsaqa: %s\n", e.what());
        return e.code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nsaqa: internal error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitInput;
}
