#include "nsaqa.h"

#include <cstring>
#include <exception>
#include <json.hpp>
#include <new>
#include <string>

#include "../core/errors.hpp"
#include "../core/eval.hpp"
#include "../core/pipeline.hpp"
#include "../core/recognition.hpp"
#include "../core/scoring.hpp"
#include "../core/segmentation.hpp"
#include "../core/stream_io.hpp"
#include "../core/synth.hpp"
#include "../core/types.hpp"

using namespace nsaqa;

struct nsaqa_stream {
    SymbolStream value;
};
struct nsaqa_config {
    AnalyzerConfig value;
};
struct nsaqa_reference {
    ReferenceDistribution value;
};
struct nsaqa_report {
    DiveReport value;
};
struct nsaqa_evaluator {
    AnalyzerConfig cfg;
    EvalAccumulator acc;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void set_err(char** err, const std::string& message) {
    if (err) *err = dup_string(message);
}

nsaqa_status status_of(const Error& e) {
    return Error::is_input_kind(e.kind()) ? NSAQA_ERR_INPUT : NSAQA_ERR_ANALYSIS;
}

template <typename Fn>
nsaqa_status guarded(char** err, Fn&& fn) {
    try {
        fn();
        return NSAQA_OK;
    } catch (const Error& e) {
        set_err(err, e.what());
        return status_of(e);
    } catch (const std::exception& e) {
        set_err(err, std::string("internal error: ") + e.what());
        return NSAQA_ERR_INTERNAL;
    } catch (...) {
        set_err(err, "internal error");
        return NSAQA_ERR_INTERNAL;
    }
}

nsaqa_status copy_out(const std::string& text, char** out, size_t* out_len, char** err) {
    char* buf = dup_string(text);
    if (!buf) {
        set_err(err, "out of memory");
        return NSAQA_ERR_INTERNAL;
    }
    *out = buf;
    if (out_len) *out_len = text.size();
    return NSAQA_OK;
}

nlohmann::ordered_json descriptor_json(const DiveDescriptor& d) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["armstand"] = d.armstand;
    j["rotation_type"] = rotation_type_name(d.rotation_type);
    j["half_somersaults"] = d.half_somersaults;
    j["half_twists"] = d.half_twists;
    j["position"] = body_position_name(d.position);
    return j;
}

nlohmann::ordered_json segmentation_json(const PhaseSegmentation& seg) {
    auto range = [](const FrameRange& r) {
        return nlohmann::ordered_json::array({r.start, r.end});
    };
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["takeoff"] = range(seg.takeoff);
    j["twist"] = seg.twist ? range(*seg.twist) : nlohmann::ordered_json(nullptr);
    j["somersault"] =
        seg.somersault ? range(*seg.somersault) : nlohmann::ordered_json(nullptr);
    j["entry"] = range(seg.entry);
    return j;
}

} // namespace

extern "C" {

const char* nsaqa_version(void) { return "1.0.0"; }

void nsaqa_string_free(char* s) { delete[] s; }

nsaqa_config* nsaqa_config_new(void) { return new (std::nothrow) nsaqa_config{}; }

void nsaqa_config_free(nsaqa_config* cfg) { delete cfg; }

nsaqa_status nsaqa_config_set(nsaqa_config* cfg, const char* key, const char* value,
                              char** err) {
    if (!cfg || !key || !value) {
        set_err(err, "config_set: null argument");
        return NSAQA_ERR_INPUT;
    }
    return guarded(err, [&] { config_set(cfg->value, key, value); });
}

nsaqa_status nsaqa_stream_parse(const char* data, size_t len, nsaqa_stream** out,
                                char** err) {
    if (!data || !out) {
        set_err(err, "stream_parse: null argument");
        return NSAQA_ERR_INPUT;
    }
    return guarded(err, [&] {
        auto* handle = new nsaqa_stream{parse_stream(std::string_view(data, len))};
        *out = handle;
    });
}

nsaqa_status nsaqa_stream_serialize(const nsaqa_stream* s, char** out, size_t* out_len,
                                    char** err) {
    if (!s || !out) {
        set_err(err, "stream_serialize: null argument");
        return NSAQA_ERR_INPUT;
    }
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard = guarded(err, [&] {
        rc = copy_out(serialize_stream(s->value), out, out_len, err);
    });
    return guard != NSAQA_OK ? guard : rc;
}

const char* nsaqa_stream_clip_id(const nsaqa_stream* s) {
    return s ? s->value.clip_id.c_str() : "";
}

void nsaqa_stream_free(nsaqa_stream* s) { delete s; }

nsaqa_status nsaqa_recognize_json(const nsaqa_stream* s, const nsaqa_config* cfg,
                                  char** out_json, char** err) {
    if (!s || !out_json) {
        set_err(err, "recognize: null argument");
        return NSAQA_ERR_INPUT;
    }
    const AnalyzerConfig config = cfg ? cfg->value : AnalyzerConfig{};
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard = guarded(err, [&] {
        const DiveDescriptor d = recognize(s->value, config);
        rc = copy_out(descriptor_json(d).dump(2) + "\n", out_json, nullptr, err);
    });
    return guard != NSAQA_OK ? guard : rc;
}

nsaqa_status nsaqa_segment_json(const nsaqa_stream* s, const nsaqa_config* cfg,
                                char** out_json, char** err) {
    if (!s || !out_json) {
        set_err(err, "segment: null argument");
        return NSAQA_ERR_INPUT;
    }
    const AnalyzerConfig config = cfg ? cfg->value : AnalyzerConfig{};
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard = guarded(err, [&] {
        const DiveDescriptor d = recognize(s->value, config);
        const PhaseSegmentation seg = segment(s->value, d, config);
        rc = copy_out(segmentation_json(seg).dump(2) + "\n", out_json, nullptr, err);
    });
    return guard != NSAQA_OK ? guard : rc;
}

nsaqa_status nsaqa_reference_build(const nsaqa_stream* const* streams, size_t count,
                                   const nsaqa_config* cfg, const char* provenance,
                                   int threads, nsaqa_reference** out, char** err) {
    if (!streams || !out) {
        set_err(err, "reference_build: null argument");
        return NSAQA_ERR_INPUT;
    }
    const AnalyzerConfig config = cfg ? cfg->value : AnalyzerConfig{};
    return guarded(err, [&] {
        std::vector<SymbolStream> corpus;
        corpus.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (!streams[i]) raise(ErrorKind::SchemaViolation, "reference_build: null stream");
            corpus.push_back(streams[i]->value);
        }
        *out = new nsaqa_reference{build_reference(
            corpus, config, provenance ? provenance : "", threads)};
    });
}

nsaqa_status nsaqa_reference_parse(const char* data, size_t len, nsaqa_reference** out,
                                   char** err) {
    if (!data || !out) {
        set_err(err, "reference_parse: null argument");
        return NSAQA_ERR_INPUT;
    }
    return guarded(err, [&] {
        *out = new nsaqa_reference{reference_from_json(std::string_view(data, len))};
    });
}

nsaqa_status nsaqa_reference_serialize(const nsaqa_reference* ref, char** out,
                                       size_t* out_len, char** err) {
    if (!ref || !out) {
        set_err(err, "reference_serialize: null argument");
        return NSAQA_ERR_INPUT;
    }
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard = guarded(err, [&] {
        rc = copy_out(reference_to_json(ref->value), out, out_len, err);
    });
    return guard != NSAQA_OK ? guard : rc;
}

void nsaqa_reference_free(nsaqa_reference* ref) { delete ref; }

nsaqa_status nsaqa_analyze(const nsaqa_stream* s, const nsaqa_reference* ref,
                           const nsaqa_config* cfg, const char* weights_json,
                           const char* templates_json, nsaqa_report** out, char** err) {
    if (!s || !ref || !out) {
        set_err(err, "analyze: null argument");
        return NSAQA_ERR_INPUT;
    }
    const AnalyzerConfig config = cfg ? cfg->value : AnalyzerConfig{};
    return guarded(err, [&] {
        std::optional<WeightProfile> weights;
        if (weights_json) weights = weights_from_json(weights_json);
        const TemplateLibrary library = templates_json
                                            ? TemplateLibrary::from_json(templates_json)
                                            : TemplateLibrary::defaults();
        *out = new nsaqa_report{
            analyze_stream(s->value, ref->value, config, weights, library)};
    });
}

nsaqa_status nsaqa_report_html(const nsaqa_report* r, char** out, size_t* out_len,
                               char** err) {
    if (!r || !out) {
        set_err(err, "report_html: null argument");
        return NSAQA_ERR_INPUT;
    }
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard =
        guarded(err, [&] { rc = copy_out(render_html(r->value), out, out_len, err); });
    return guard != NSAQA_OK ? guard : rc;
}

nsaqa_status nsaqa_report_json(const nsaqa_report* r, char** out, size_t* out_len,
                               char** err) {
    if (!r || !out) {
        set_err(err, "report_json: null argument");
        return NSAQA_ERR_INPUT;
    }
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard =
        guarded(err, [&] { rc = copy_out(report_to_json(r->value), out, out_len, err); });
    return guard != NSAQA_OK ? guard : rc;
}

double nsaqa_report_overall(const nsaqa_report* r) { return r ? r->value.overall : 0.0; }

void nsaqa_report_free(nsaqa_report* r) { delete r; }

nsaqa_status nsaqa_synth_sample(uint64_t seed, uint64_t index, double noise_sigma,
                                double pose_dropout, nsaqa_stream** out_stream,
                                char** out_ground_truth_json, char** err) {
    if (!out_stream) {
        set_err(err, "synth_sample: null argument");
        return NSAQA_ERR_INPUT;
    }
    return guarded(err, [&] {
        auto [stream, gt] = synth::sample_one(seed, static_cast<std::int64_t>(index),
                                              noise_sigma, pose_dropout);
        *out_stream = new nsaqa_stream{std::move(stream)};
        if (out_ground_truth_json)
            *out_ground_truth_json = dup_string(synth::ground_truth_to_json(gt));
    });
}

nsaqa_evaluator* nsaqa_evaluator_new(const nsaqa_config* cfg) {
    auto* ev = new (std::nothrow) nsaqa_evaluator{};
    if (ev && cfg) ev->cfg = cfg->value;
    return ev;
}

void nsaqa_evaluator_free(nsaqa_evaluator* ev) { delete ev; }

nsaqa_status nsaqa_evaluator_add(nsaqa_evaluator* ev, const nsaqa_stream* s,
                                 const char* ground_truth_json, char** err) {
    if (!ev || !s || !ground_truth_json) {
        set_err(err, "evaluator_add: null argument");
        return NSAQA_ERR_INPUT;
    }
    return guarded(err, [&] {
        const synth::GroundTruth gt = synth::ground_truth_from_json(ground_truth_json);
        evaluate_pair(ev->acc, s->value, gt, ev->cfg);
    });
}

nsaqa_status nsaqa_evaluator_summary_json(const nsaqa_evaluator* ev, char** out_json,
                                          char** err) {
    if (!ev || !out_json) {
        set_err(err, "evaluator_summary: null argument");
        return NSAQA_ERR_INPUT;
    }
    nsaqa_status rc = NSAQA_OK;
    const nsaqa_status guard = guarded(err, [&] {
        rc = copy_out(ev->acc.summary_json(), out_json, nullptr, err);
    });
    return guard != NSAQA_OK ? guard : rc;
}

} // extern "C"
