#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "errors.hpp"
#include "templates_data.hpp"

namespace nsaqa {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string sig3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<std::string> extract_placeholders(const std::string& text) {
    std::vector<std::string> out;
    size_t pos = 0;
    while ((pos = text.find('{', pos)) != std::string::npos) {
        const size_t end = text.find('}', pos);
        if (end == std::string::npos)
            raise(ErrorKind::SchemaViolation, "template: unterminated '{' in text");
        out.push_back(text.substr(pos + 1, end - pos - 1));
        pos = end + 1;
    }
    return out;
}

std::string category_text(DistanceCategory c) {
    switch (c) {
        case DistanceCategory::too_close: return "too close";
        case DistanceCategory::good: return "good";
        case DistanceCategory::too_far: return "too far";
    }
    return "?";
}

std::string escape_html(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

std::string format_severity(MetricUnit unit, double v) {
    return unit == MetricUnit::fraction ? sig3(v) : fixed1(v);
}

std::string range_text(const FrameRange& r) {
    return "frames " + std::to_string(r.start) + "\xE2\x80\x93" + std::to_string(r.end);
}

} // namespace

std::string format_value(const PlaceholderValue& v) {
    switch (v.kind) {
        case PlaceholderValue::Kind::degrees:
        case PlaceholderValue::Kind::torso_lengths:
        case PlaceholderValue::Kind::score:
            return fixed1(v.number);
        case PlaceholderValue::Kind::fraction:
            return sig3(v.number);
        case PlaceholderValue::Kind::text:
            return v.str;
    }
    return {};
}

std::string fill_template(const SentenceTemplate& t,
                          const std::map<std::string, PlaceholderValue>& values) {
    for (const auto& [key, value] : values) {
        if (std::find(t.placeholders.begin(), t.placeholders.end(), key) ==
            t.placeholders.end())
            raise(ErrorKind::UnknownPlaceholder,
                  "fill_template: value for unknown placeholder '" + key + "'");
    }
    std::string out;
    size_t pos = 0;
    while (pos < t.text.size()) {
        const size_t open = t.text.find('{', pos);
        if (open == std::string::npos) {
            out += t.text.substr(pos);
            break;
        }
        out += t.text.substr(pos, open - pos);
        const size_t close = t.text.find('}', open);
        const std::string key = t.text.substr(open + 1, close - open - 1);
        const auto it = values.find(key);
        if (it == values.end())
            raise(ErrorKind::MissingPlaceholder,
                  "fill_template: missing placeholder '" + key + "'");
        out += format_value(it->second);
        pos = close + 1;
    }
    return out;
}

TemplateLibrary TemplateLibrary::defaults() {
    return from_json(detail::kDefaultTemplatesJson);
}

TemplateLibrary TemplateLibrary::from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorKind::MalformedDocument, "template library: invalid JSON object");
    TemplateLibrary lib;
    for (const auto& [key, value] : j.items()) {
        if (key != "summary" && !aspect_from_name(key))
            raise(ErrorKind::SchemaViolation,
                  "template library: unknown entry '" + key + "'");
        SentenceTemplate t;
        try {
            t.text = value.at("text").get<std::string>();
            for (const auto& p : value.at("placeholders")) t.placeholders.push_back(p.get<std::string>());
        } catch (const json::exception& e) {
            raise(ErrorKind::SchemaViolation,
                  "template library: entry '" + key + "': " + e.what());
        }
        // declared placeholders and the ones used in the text must agree
        std::vector<std::string> used = extract_placeholders(t.text);
        std::vector<std::string> declared = t.placeholders;
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        std::sort(declared.begin(), declared.end());
        if (used != declared)
            raise(ErrorKind::SchemaViolation,
                  "template library: entry '" + key +
                      "' declares placeholders that do not match its text");
        lib.templates_[key] = std::move(t);
    }
    for (int i = 0; i < kAspectCount; ++i) {
        if (!lib.templates_.count(aspect_name(static_cast<AspectId>(i))))
            raise(ErrorKind::SchemaViolation,
                  std::string("template library: missing entry '") +
                      aspect_name(static_cast<AspectId>(i)) + "'");
    }
    if (!lib.templates_.count("summary"))
        raise(ErrorKind::SchemaViolation, "template library: missing entry 'summary'");
    return lib;
}

const SentenceTemplate& TemplateLibrary::for_aspect(AspectId a) const {
    return templates_.at(aspect_name(a));
}

const SentenceTemplate& TemplateLibrary::summary() const { return templates_.at("summary"); }

std::string describe_dive(const DiveDescriptor& d) {
    auto halves = [](int h) {
        if (h % 2 == 0) return std::to_string(h / 2);
        return std::to_string(h / 2) + ".5";
    };
    std::string out;
    if (d.armstand) out += "armstand ";
    out += rotation_type_name(d.rotation_type);
    out += " ";
    out += halves(d.half_somersaults);
    out += "-somersault dive";
    if (d.half_twists > 0) {
        const std::string t = halves(d.half_twists);
        out += " with " + t + (t == "1" ? " twist" : " twists");
    } else {
        out += " with no twists";
    }
    out += " in ";
    out += body_position_name(d.position);
    out += " position";
    return out;
}

namespace {

std::map<std::string, PlaceholderValue> aspect_values(const AspectScore& score) {
    const RawMetric& raw = *score.raw;
    using PV = PlaceholderValue;
    switch (score.aspect) {
        case AspectId::feet_apart:
            return {{"avg_feet_apart_deg", PV::degrees(raw.value)}};
        case AspectId::height_off_platform:
            return {{"apex_height_torso", PV::torso_lengths(raw.value)}};
        case AspectId::distance_from_platform:
            return {{"min_distance_torso", PV::torso_lengths(raw.value)},
                    {"distance_category", PV::text(category_text(*score.category))}};
        case AspectId::somersault_tightness:
            return {{"mean_somersault_angle_deg", PV::degrees(raw.value)}};
        case AspectId::knee_straightness:
            return {{"avg_knee_bend_deg", PV::degrees(raw.value)}};
        case AspectId::twist_tightness:
            return {{"avg_twist_line_dev_deg", PV::degrees(raw.value)}};
        case AspectId::verticalness:
            return {{"entry_tilt_deg", PV::degrees(raw.value)}};
        case AspectId::entry_straightness:
            return {{"avg_entry_line_dev_deg", PV::degrees(raw.value)}};
        case AspectId::splash_size:
            return {{"splash_area_fraction", PV::fraction(raw.value)}};
    }
    raise(ErrorKind::UnknownAspect, "aspect_values: unknown aspect");
}

} // namespace

DiveReport compose_report(const SymbolStream& s, const DiveAnalysis& analysis,
                          const TemplateLibrary& library) {
    if (analysis.clip_id != s.clip_id)
        raise(ErrorKind::InconsistentInputs,
              "compose_report: analysis belongs to clip '" + analysis.clip_id +
                  "', stream is '" + s.clip_id + "'");
    DiveReport r;
    r.clip_id = s.clip_id;
    r.descriptor = analysis.descriptor;
    r.segmentation = analysis.segmentation;
    r.aspect_scores = analysis.scores;
    r.overall = analysis.overall;
    for (const auto& score : analysis.scores) {
        if (!score.applicable) continue;
        r.sentences[score.aspect] =
            fill_template(library.for_aspect(score.aspect), aspect_values(score));
        if (!score.raw->evidence.empty())
            r.evidence.entries[score.aspect] = score.raw->evidence;
    }
    r.summary_sentence = fill_template(
        library.summary(),
        {{"dive_description", PlaceholderValue::text(describe_dive(analysis.descriptor))},
         {"overall_score", PlaceholderValue::score(analysis.overall)}});
    return r;
}

std::string render_html(const DiveReport& r) {
    std::string h;
    const std::string clip = escape_html(r.clip_id);
    h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    h += "<title>Dive report: " + clip + "</title>\n";
    h += "<style>\n"
         "body{font-family:sans-serif;margin:2em;max-width:60em;}\n"
         "table{border-collapse:collapse;width:100%;}\n"
         "td,th{border:1px solid #999;padding:0.4em 0.7em;text-align:left;vertical-align:top;}\n"
         ".na{color:#777;}\n"
         ".overall{font-size:1.3em;font-weight:bold;}\n"
         "</style>\n</head>\n<body>\n";
    h += "<h1>Dive report: " + clip + "</h1>\n";
    h += "<p>" + escape_html(r.summary_sentence) + "</p>\n";
    h += "<p class=\"overall\">Overall score: " + fixed1(r.overall) + "</p>\n";
    h += "<h2>Recognized dive</h2>\n<p>" + escape_html(describe_dive(r.descriptor)) + "</p>\n";
    h += "<h2>Phases</h2>\n<ul>\n";
    h += "<li>start/takeoff: " + range_text(r.segmentation.takeoff) + "</li>\n";
    h += "<li>twist: " +
         (r.segmentation.twist ? range_text(*r.segmentation.twist)
                               : std::string("not present")) +
         "</li>\n";
    h += "<li>somersault: " +
         (r.segmentation.somersault ? range_text(*r.segmentation.somersault)
                                    : std::string("not present")) +
         "</li>\n";
    h += "<li>entry: " + range_text(r.segmentation.entry) + "</li>\n";
    h += "</ul>\n";
    h += "<h2>Aspects</h2>\n<table>\n";
    h += "<tr><th>Aspect</th><th>Score</th><th>Finding</th><th>Evidence (frame: severity)</th></tr>\n";
    for (const auto& score : r.aspect_scores) {
        h += "<tr><td>";
        h += aspect_display_name(score.aspect);
        h += "</td>";
        if (!score.applicable) {
            h += "<td class=\"na\">N/A</td><td class=\"na\">N/A</td><td></td></tr>\n";
            continue;
        }
        h += "<td>";
        if (score.category) h += escape_html(category_text(*score.category)) + " (";
        h += fixed1(score.display);
        if (score.category) h += ")";
        h += "</td><td>";
        const auto sit = r.sentences.find(score.aspect);
        h += sit != r.sentences.end() ? escape_html(sit->second) : "";
        h += "</td><td>";
        const auto eit = r.evidence.entries.find(score.aspect);
        if (eit != r.evidence.entries.end()) {
            bool first = true;
            for (const auto& e : eit->second) {
                if (!first) h += "; ";
                first = false;
                h += "frame " + std::to_string(e.frame) + ": " +
                     format_severity(score.raw->unit, e.severity);
            }
        }
        h += "</td></tr>\n";
    }
    h += "</table>\n</body>\n</html>\n";
    return h;
}

namespace {

ordered_json range_json(const FrameRange& r) { return ordered_json::array({r.start, r.end}); }

} // namespace

std::string report_to_json(const DiveReport& r) {
    ordered_json j = ordered_json::object();
    j["clip_id"] = r.clip_id;
    ordered_json jd = ordered_json::object();
    jd["armstand"] = r.descriptor.armstand;
    jd["rotation_type"] = rotation_type_name(r.descriptor.rotation_type);
    jd["half_somersaults"] = r.descriptor.half_somersaults;
    jd["half_twists"] = r.descriptor.half_twists;
    jd["position"] = body_position_name(r.descriptor.position);
    j["descriptor"] = std::move(jd);
    ordered_json jp = ordered_json::object();
    jp["takeoff"] = range_json(r.segmentation.takeoff);
    jp["twist"] =
        r.segmentation.twist ? range_json(*r.segmentation.twist) : ordered_json(nullptr);
    jp["somersault"] = r.segmentation.somersault ? range_json(*r.segmentation.somersault)
                                                 : ordered_json(nullptr);
    jp["entry"] = range_json(r.segmentation.entry);
    j["segmentation"] = std::move(jp);
    ordered_json aspects = ordered_json::array();
    for (const auto& score : r.aspect_scores) {
        ordered_json a = ordered_json::object();
        a["aspect"] = aspect_name(score.aspect);
        a["applicable"] = score.applicable;
        if (score.applicable) {
            a["raw_value"] = score.raw->value;
            a["unit"] = unit_name(score.raw->unit);
            a["polarity"] = polarity_name(score.raw->polarity);
            a["percentile"] = score.percentile;
            a["display"] = score.display;
            a["category"] = score.category
                                ? ordered_json(distance_category_name(*score.category))
                                : ordered_json(nullptr);
            ordered_json ev = ordered_json::array();
            for (const auto& e : score.raw->evidence) {
                ordered_json je = ordered_json::object();
                je["frame"] = e.frame;
                je["severity"] = e.severity;
                ev.push_back(std::move(je));
            }
            a["evidence"] = std::move(ev);
            const auto sit = r.sentences.find(score.aspect);
            a["sentence"] = sit != r.sentences.end() ? ordered_json(sit->second)
                                                     : ordered_json(nullptr);
        }
        aspects.push_back(std::move(a));
    }
    j["aspects"] = std::move(aspects);
    j["overall"] = r.overall;
    j["summary"] = r.summary_sentence;
    return j.dump(2) + "\n";
}

} // namespace nsaqa
