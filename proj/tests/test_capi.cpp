#include <doctest.h>

#include <json.hpp>
#include <string>
#include <vector>

#include "core/stream_io.hpp"
#include "core/synth.hpp"
#include "nsaqa.h"
#include "support/helpers.hpp"

using json = nlohmann::json;

namespace {

struct Str {
    char* p = nullptr;
    ~Str() { nsaqa_string_free(p); }
    std::string get() const { return p ? std::string(p) : std::string(); }
};

struct Stream {
    nsaqa_stream* p = nullptr;
    ~Stream() { nsaqa_stream_free(p); }
};

std::string serialized_sample(std::int64_t index, double noise = 0.0) {
    const auto [stream, gt] = nsaqa::synth::sample_one(4242, index, noise);
    return nsaqa::serialize_stream(stream);
}

} // namespace

TEST_CASE("C API round-trips a stream byte-exactly") {
    const std::string doc = serialized_sample(0);
    Stream s;
    Str err;
    REQUIRE(nsaqa_stream_parse(doc.data(), doc.size(), &s.p, &err.p) == NSAQA_OK);
    CHECK(std::string(nsaqa_stream_clip_id(s.p)) == "synth-4242-00000");
    Str out;
    size_t len = 0;
    REQUIRE(nsaqa_stream_serialize(s.p, &out.p, &len, &err.p) == NSAQA_OK);
    CHECK(out.get() == doc);
}

TEST_CASE("C API maps malformed input to the input error class") {
    Stream s;
    Str err;
    CHECK(nsaqa_stream_parse("{oops", 5, &s.p, &err.p) == NSAQA_ERR_INPUT);
    CHECK(err.get().find("JSON") != std::string::npos);
}

TEST_CASE("C API config rejects unknown keys") {
    nsaqa_config* cfg = nsaqa_config_new();
    Str err;
    CHECK(nsaqa_config_set(cfg, "som_angle_threshold_deg", "70", &err.p) == NSAQA_OK);
    Str err2;
    CHECK(nsaqa_config_set(cfg, "frobnicate", "1", &err2.p) == NSAQA_ERR_INPUT);
    CHECK(err2.get().find("frobnicate") != std::string::npos);
    nsaqa_config_free(cfg);
}

TEST_CASE("C API recognition and segmentation return the documented JSON") {
    const std::string doc = serialized_sample(1);
    Stream s;
    Str err;
    REQUIRE(nsaqa_stream_parse(doc.data(), doc.size(), &s.p, &err.p) == NSAQA_OK);

    Str rec;
    REQUIRE(nsaqa_recognize_json(s.p, nullptr, &rec.p, &err.p) == NSAQA_OK);
    const json jd = json::parse(rec.get());
    CHECK(jd.contains("armstand"));
    CHECK(jd.contains("rotation_type"));
    CHECK(jd.contains("half_somersaults"));
    CHECK(jd.contains("half_twists"));
    CHECK(jd.contains("position"));

    Str seg;
    REQUIRE(nsaqa_segment_json(s.p, nullptr, &seg.p, &err.p) == NSAQA_OK);
    const json js = json::parse(seg.get());
    CHECK(js.contains("takeoff"));
    CHECK(js.contains("twist"));
    CHECK(js.contains("somersault"));
    CHECK(js.contains("entry"));
}

TEST_CASE("C API analysis failures map to the analysis error class") {
    // a stationary clip: parses fine, never leaves the platform
    nsaqa::SymbolStream stationary = nsaqa::testing::blank_stream(20);
    for (auto& f : stationary.frames)
        f.pose = nsaqa::testing::standing_pose({310.0, 250.0});
    const std::string doc = nsaqa::serialize_stream(stationary);
    Stream s;
    Str err;
    REQUIRE(nsaqa_stream_parse(doc.data(), doc.size(), &s.p, &err.p) == NSAQA_OK);
    Str rec;
    Str err2;
    CHECK(nsaqa_recognize_json(s.p, nullptr, &rec.p, &err2.p) == NSAQA_ERR_ANALYSIS);
    CHECK(err2.get().find("platform") != std::string::npos);
}

TEST_CASE("C API builds, serializes and reuses references end to end") {
    std::vector<Stream> streams(20);
    std::vector<const nsaqa_stream*> raw;
    for (std::int64_t i = 0; i < 20; ++i) {
        const std::string doc = serialized_sample(i);
        Str err;
        REQUIRE(nsaqa_stream_parse(doc.data(), doc.size(), &streams[static_cast<size_t>(i)].p,
                                   &err.p) == NSAQA_OK);
        raw.push_back(streams[static_cast<size_t>(i)].p);
    }
    nsaqa_reference* ref = nullptr;
    Str err;
    REQUIRE(nsaqa_reference_build(raw.data(), raw.size(), nullptr, "capi-test", 2, &ref,
                                  &err.p) == NSAQA_OK);
    Str text;
    size_t len = 0;
    REQUIRE(nsaqa_reference_serialize(ref, &text.p, &len, &err.p) == NSAQA_OK);

    nsaqa_reference* back = nullptr;
    REQUIRE(nsaqa_reference_parse(text.p, len, &back, &err.p) == NSAQA_OK);

    nsaqa_report* report = nullptr;
    REQUIRE(nsaqa_analyze(raw[0], back, nullptr, nullptr, nullptr, &report, &err.p) ==
            NSAQA_OK);
    Str html;
    REQUIRE(nsaqa_report_html(report, &html.p, nullptr, &err.p) == NSAQA_OK);
    CHECK(html.get().rfind("<!DOCTYPE html>", 0) == 0);
    Str rjson;
    REQUIRE(nsaqa_report_json(report, &rjson.p, nullptr, &err.p) == NSAQA_OK);
    const json jr = json::parse(rjson.get());
    CHECK(jr.at("overall").get<double>() == nsaqa_report_overall(report));
    CHECK(jr.at("aspects").size() == 9);

    // weighted analysis through the C surface
    nsaqa_report* weighted = nullptr;
    REQUIRE(nsaqa_analyze(raw[0], back, nullptr, R"({"splash_size": 1.0})", nullptr,
                          &weighted, &err.p) == NSAQA_OK);
    CHECK(nsaqa_report_overall(weighted) >= 0.0);
    nsaqa_report_free(weighted);
    nsaqa_report_free(report);
    nsaqa_reference_free(back);
    nsaqa_reference_free(ref);
}

TEST_CASE("C API synthetic sampling is deterministic and self-describing") {
    Stream a, b;
    Str gta, gtb, err;
    REQUIRE(nsaqa_synth_sample(7, 3, 0.0, 0.0, &a.p, &gta.p, &err.p) == NSAQA_OK);
    REQUIRE(nsaqa_synth_sample(7, 3, 0.0, 0.0, &b.p, &gtb.p, &err.p) == NSAQA_OK);
    Str sa, sb;
    size_t la = 0, lb = 0;
    REQUIRE(nsaqa_stream_serialize(a.p, &sa.p, &la, &err.p) == NSAQA_OK);
    REQUIRE(nsaqa_stream_serialize(b.p, &sb.p, &lb, &err.p) == NSAQA_OK);
    CHECK(sa.get() == sb.get());
    CHECK(gta.get() == gtb.get());
    CHECK(json::parse(gta.get()).contains("descriptor"));
}

TEST_CASE("C API evaluator reproduces perfect clean-corpus metrics") {
    nsaqa_evaluator* ev = nsaqa_evaluator_new(nullptr);
    for (std::int64_t i = 0; i < 12; ++i) {
        Stream s;
        Str gt, err;
        REQUIRE(nsaqa_synth_sample(99, i, 0.0, 0.0, &s.p, &gt.p, &err.p) == NSAQA_OK);
        REQUIRE(nsaqa_evaluator_add(ev, s.p, gt.p, &err.p) == NSAQA_OK);
    }
    Str summary, err;
    REQUIRE(nsaqa_evaluator_summary_json(ev, &summary.p, &err.p) == NSAQA_OK);
    const json j = json::parse(summary.get());
    CHECK(j.at("n").get<int>() == 12);
    CHECK(j.at("failures").get<int>() == 0);
    CHECK(j.at("accuracy").at("half_somersaults").get<double>() == 1.0);
    CHECK(j.at("aiou").at("overall").at("0.50").get<double>() == 1.0);
    nsaqa_evaluator_free(ev);
}
