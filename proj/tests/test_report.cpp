#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/report.hpp"
#include "core/scoring.hpp"
#include "core/synth.hpp"

using namespace nsaqa;

namespace {

ReferenceDistribution corpus_reference() {
    AnalyzerConfig cfg;
    std::vector<SymbolStream> corpus;
    for (std::uint64_t i = 0; i < 24; ++i)
        corpus.push_back(synth::sample_one(808, static_cast<std::int64_t>(i)).first);
    return build_reference(corpus, cfg, "unit-test corpus", 2);
}

} // namespace

TEST_CASE("fill_template substitutes with unit-aware formatting") {
    SentenceTemplate t;
    t.text = "was on average {avg_feet_apart_deg} degrees for your dive";
    t.placeholders = {"avg_feet_apart_deg"};

    CHECK(fill_template(t, {{"avg_feet_apart_deg", PlaceholderValue::degrees(12.3)}}) ==
          "was on average 12.3 degrees for your dive");
    CHECK(fill_template(t, {{"avg_feet_apart_deg", PlaceholderValue::degrees(12.34)}}) ==
          "was on average 12.3 degrees for your dive");

    SentenceTemplate plain;
    plain.text = "nothing to fill in";
    CHECK(fill_template(plain, {}) == "nothing to fill in");

    SentenceTemplate frac;
    frac.text = "{splash_area_fraction}";
    frac.placeholders = {"splash_area_fraction"};
    CHECK(fill_template(frac, {{"splash_area_fraction",
                                PlaceholderValue::fraction(0.00542534722)}}) == "0.00543");
}

TEST_CASE("fill_template names missing and unknown placeholders") {
    SentenceTemplate t;
    t.text = "angle {avg_feet_apart_deg}";
    t.placeholders = {"avg_feet_apart_deg"};
    try {
        fill_template(t, {});
        FAIL("expected MissingPlaceholder");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingPlaceholder);
        CHECK(std::string(e.what()).find("avg_feet_apart_deg") != std::string::npos);
    }
    try {
        fill_template(t, {{"avg_feet_apart_deg", PlaceholderValue::degrees(1.0)},
                          {"surprise", PlaceholderValue::degrees(2.0)}});
        FAIL("expected UnknownPlaceholder");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownPlaceholder);
        CHECK(std::string(e.what()).find("surprise") != std::string::npos);
    }
}

TEST_CASE("the template library validates placeholder declarations") {
    CHECK_THROWS_AS(TemplateLibrary::from_json(
                        R"({"feet_apart": {"text": "{a}", "placeholders": ["b"]}})"),
                    Error);
    CHECK_THROWS_AS(TemplateLibrary::from_json("not json"), Error);
    const TemplateLibrary lib = TemplateLibrary::defaults();
    CHECK(lib.for_aspect(AspectId::feet_apart).text.find("was on average") !=
          std::string::npos);
}

TEST_CASE("describe_dive spells out the recognized dive") {
    CHECK(describe_dive({false, RotationType::forward, 5, 6, BodyPosition::free_position}) ==
          "forward 2.5-somersault dive with 3 twists in free position");
    CHECK(describe_dive({true, RotationType::backward, 4, 0, BodyPosition::pike}) ==
          "armstand backward 2-somersault dive with no twists in pike position");
    CHECK(describe_dive({false, RotationType::inward, 3, 2, BodyPosition::straight}) ==
          "inward 1.5-somersault dive with 1 twist in straight position");
}

TEST_CASE("compose and render a full synthetic dive deterministically") {
    AnalyzerConfig cfg;
    const ReferenceDistribution ref = corpus_reference();
    const auto [stream, gt] = synth::sample_one(808, 3);
    const TemplateLibrary lib = TemplateLibrary::defaults();

    const DiveReport a = analyze_stream(stream, ref, cfg, std::nullopt, lib);
    const DiveReport b = analyze_stream(stream, ref, cfg, std::nullopt, lib);
    CHECK(render_html(a) == render_html(b));
    CHECK(report_to_json(a) == report_to_json(b));

    const std::string html = render_html(a);
    SUBCASE("structure: one aspect table, one row per aspect") {
        size_t tables = 0, pos = 0;
        while ((pos = html.find("<table", pos)) != std::string::npos) {
            ++tables;
            pos += 6;
        }
        CHECK(tables == 1);
        size_t rows = 0;
        pos = 0;
        while ((pos = html.find("<tr><td>", pos)) != std::string::npos) {
            ++rows;
            pos += 8;
        }
        CHECK(rows == static_cast<size_t>(kAspectCount));
        CHECK(html.find("<!DOCTYPE html>") == 0);
    }
    SUBCASE("applicable aspects carry sentences, inapplicable show N/A") {
        for (const auto& score : a.aspect_scores) {
            if (score.applicable) {
                CHECK(a.sentences.count(score.aspect) == 1);
            } else {
                CHECK(a.sentences.count(score.aspect) == 0);
            }
        }
        const size_t na = [&] {
            size_t count = 0, p = 0;
            while ((p = html.find("class=\"na\"", p)) != std::string::npos) {
                ++count;
                p += 10;
            }
            return count;
        }();
        size_t inapplicable = 0;
        for (const auto& s : a.aspect_scores)
            if (!s.applicable) ++inapplicable;
        CHECK(na == 2 * inapplicable); // two N/A cells per missing aspect
    }
    SUBCASE("numeric score strings in the HTML re-parse to the report values") {
        for (const auto& score : a.aspect_scores) {
            if (!score.applicable) continue;
            char expected[32];
            std::snprintf(expected, sizeof(expected), "<td>%.1f</td>", score.display);
            if (score.category) continue; // distance renders with its category label
            CHECK(html.find(expected) != std::string::npos);
            CHECK(std::strtod(expected + 4, nullptr) == doctest::Approx(score.display));
        }
        char overall[48];
        std::snprintf(overall, sizeof(overall), "Overall score: %.1f", a.overall);
        CHECK(html.find(overall) != std::string::npos);
    }
    SUBCASE("overall agrees with the uniform aggregate of the scores") {
        CHECK(a.overall == doctest::Approx(aggregate(a.aspect_scores, std::nullopt)));
    }
}

TEST_CASE("tuck reports mark knee straightness not applicable") {
    AnalyzerConfig cfg;
    const ReferenceDistribution ref = corpus_reference();
    synth::ScriptParams p;
    p.clip_id = "tuck-dive";
    p.descriptor = {false, RotationType::forward, 4, 0, BodyPosition::tuck};
    const auto [stream, gt] = synth::generate(synth::build_script(p), 12);
    const DiveReport r =
        analyze_stream(stream, ref, cfg, std::nullopt, TemplateLibrary::defaults());

    bool knee_found = false;
    for (const auto& score : r.aspect_scores) {
        if (score.aspect == AspectId::knee_straightness) {
            knee_found = true;
            CHECK(!score.applicable);
        }
    }
    CHECK(knee_found);
    CHECK(r.sentences.count(AspectId::knee_straightness) == 0);
    const std::string html = render_html(r);
    CHECK(html.find("N/A") != std::string::npos);
}

TEST_CASE("compose_report rejects cross-clip inputs") {
    AnalyzerConfig cfg;
    const ReferenceDistribution ref = corpus_reference();
    const auto [stream, gt] = synth::sample_one(808, 5);

    DiveAnalysis analysis;
    analysis.clip_id = "someone-else";
    analysis.descriptor = gt.descriptor;
    analysis.segmentation = gt.phases;
    analysis.overall = 5.0;
    try {
        compose_report(stream, analysis, TemplateLibrary::defaults());
        FAIL("expected InconsistentInputs");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InconsistentInputs);
    }
}

TEST_CASE("weighted analysis shifts the overall toward the weighted aspect") {
    AnalyzerConfig cfg;
    const ReferenceDistribution ref = corpus_reference();
    const auto [stream, gt] = synth::sample_one(808, 7);

    WeightProfile w;
    w.weights.fill(0.0);
    w.weights[static_cast<size_t>(AspectId::splash_size)] = 1.0;
    const DiveReport r = analyze_stream(stream, ref, cfg, w, TemplateLibrary::defaults());
    for (const auto& score : r.aspect_scores) {
        if (score.aspect == AspectId::splash_size) {
            CHECK(r.overall == doctest::Approx(score.display));
        }
    }
}
