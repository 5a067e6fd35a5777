#ifndef NSAQA_CORE_REPORT_HPP
#define NSAQA_CORE_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scoring.hpp"
#include "types.hpp"

namespace nsaqa {

/// One fillable sentence. Numbers are formatted by unit: one decimal for
/// degrees, torso-lengths and scores, three significant digits for
/// fractions. String values pass through verbatim.
struct SentenceTemplate {
    std::string text;
    std::vector<std::string> placeholders;
};

struct PlaceholderValue {
    enum class Kind { degrees, torso_lengths, fraction, score, text };
    Kind kind = Kind::text;
    double number = 0.0;
    std::string str;

    static PlaceholderValue degrees(double v) { return {Kind::degrees, v, {}}; }
    static PlaceholderValue torso_lengths(double v) { return {Kind::torso_lengths, v, {}}; }
    static PlaceholderValue fraction(double v) { return {Kind::fraction, v, {}}; }
    static PlaceholderValue score(double v) { return {Kind::score, v, {}}; }
    static PlaceholderValue text(std::string v) { return {Kind::text, 0.0, std::move(v)}; }
};

std::string format_value(const PlaceholderValue& v);

/// Substitutes every placeholder; MissingPlaceholder / UnknownPlaceholder
/// name the offending key.
std::string fill_template(const SentenceTemplate& t,
                          const std::map<std::string, PlaceholderValue>& values);

/// The sentence library: one template per aspect plus a "summary" entry.
/// Stored as a data file so wording can change without code changes; an
/// identical copy is compiled in as the default.
class TemplateLibrary {
public:
    static TemplateLibrary defaults();
    static TemplateLibrary from_json(std::string_view text);

    const SentenceTemplate& for_aspect(AspectId a) const;
    const SentenceTemplate& summary() const;

private:
    std::map<std::string, SentenceTemplate> templates_;
};

struct EvidenceTable {
    // per aspect, sorted by severity descending
    std::map<AspectId, std::vector<EvidenceEntry>> entries;
};

struct DiveReport {
    std::string clip_id;
    DiveDescriptor descriptor;
    PhaseSegmentation segmentation;
    std::vector<AspectScore> aspect_scores;
    double overall = 0.0;
    std::map<AspectId, std::string> sentences; // applicable aspects only
    std::string summary_sentence;
    EvidenceTable evidence;
};

/// Output of the analysis stages for one clip, as handed to the report
/// builder.
struct DiveAnalysis {
    std::string clip_id;
    DiveDescriptor descriptor;
    PhaseSegmentation segmentation;
    std::vector<AspectScore> scores;
    double overall = 0.0;
};

/// "forward 2.5-somersault dive with 3 twists in free position" and friends.
std::string describe_dive(const DiveDescriptor& d);

/// Assembles the report. Throws InconsistentInputs when the analysis does
/// not belong to the stream.
DiveReport compose_report(const SymbolStream& s, const DiveAnalysis& analysis,
                          const TemplateLibrary& library);

/// Self-contained HTML: header, phase timeline, one row per aspect (score,
/// sentence, evidence frames), overall score. Byte-deterministic.
std::string render_html(const DiveReport& r);

/// Machine-readable mirror of the report (see SCHEMA.md).
std::string report_to_json(const DiveReport& r);

} // namespace nsaqa

#endif
