#ifndef NSAQA_CORE_SCORING_HPP
#define NSAQA_CORE_SCORING_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "types.hpp"

namespace nsaqa {

// Distance-from-platform band, torso-lengths.
inline constexpr double kDistanceTooClose = 0.3;
inline constexpr double kDistanceTooFar = 2.0;
inline constexpr double kDistanceBandCenter = 0.5 * (kDistanceTooClose + kDistanceTooFar);

DistanceCategory distance_category(double torso_lengths);

/// Each microprogram measures one raw error quantity from the stream plus
/// the recognized dive and its phases. They throw PhaseAbsent when their
/// phase is missing and NoUsablePose when the pose data cannot support them.
RawMetric mp_feet_apart(const SymbolStream& s, const PhaseSegmentation& seg,
                        const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_height_off_platform(const SymbolStream& s, const PhaseSegmentation& seg,
                                 const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_distance_from_platform(const SymbolStream& s, const PhaseSegmentation& seg,
                                    const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_somersault_tightness(const SymbolStream& s, const PhaseSegmentation& seg,
                                  const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_knee_straightness(const SymbolStream& s, const PhaseSegmentation& seg,
                               const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_twist_tightness(const SymbolStream& s, const PhaseSegmentation& seg,
                             const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_verticalness(const SymbolStream& s, const PhaseSegmentation& seg,
                          const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_entry_straightness(const SymbolStream& s, const PhaseSegmentation& seg,
                                const DiveDescriptor& d, const AnalyzerConfig& cfg);
RawMetric mp_splash_size(const SymbolStream& s, const PhaseSegmentation& seg,
                         const DiveDescriptor& d, const AnalyzerConfig& cfg);

/// Runs one microprogram by aspect id.
RawMetric run_microprogram(AspectId aspect, const SymbolStream& s,
                           const PhaseSegmentation& seg, const DiveDescriptor& d,
                           const AnalyzerConfig& cfg);

/// The meta-program: which aspects apply to this dive. Knee straightness is
/// dropped for tuck dives, twist tightness without a twist phase, somersault
/// tightness for straight dives or without a somersault phase.
std::set<AspectId> meta_select(const DiveDescriptor& d, const PhaseSegmentation& seg);

struct ReferenceMetadata {
    std::string name;
    std::int64_t sample_count = 0;
    std::string provenance;
    std::int64_t skipped = 0;
};

struct ReferenceDistribution {
    ReferenceMetadata metadata;
    std::array<std::vector<double>, kAspectCount> aspects; // each sorted ascending

    const std::vector<double>& samples(AspectId a) const {
        return aspects[static_cast<size_t>(a)];
    }
};

/// Percentile of a raw metric against the reference population: the share
/// of reference dives this value beats, with ties counted half. 100 is best.
/// Band metrics rank by distance to the band center.
double percentile(const RawMetric& raw, const ReferenceDistribution& ref);

struct WeightProfile {
    std::array<double, kAspectCount> weights{}; // non-negative

    static WeightProfile uniform();
};

/// Mean of the applicable aspects' display scores, optionally weighted
/// (weights renormalized over the applicable subset). Rounded to one decimal
/// at the end only.
double aggregate(const std::vector<AspectScore>& scores,
                 const std::optional<WeightProfile>& weights);

/// Scores one analyzed dive against a reference: runs the applicable
/// microprograms, ranks them, and fills display values. Aspects whose phase
/// is absent come back inapplicable.
std::vector<AspectScore> score_aspects(const SymbolStream& s, const DiveDescriptor& d,
                                       const PhaseSegmentation& seg,
                                       const ReferenceDistribution& ref,
                                       const AnalyzerConfig& cfg);

/// Builds a reference distribution by analyzing every stream in the corpus.
/// Streams that fail analysis are skipped and counted in the metadata.
/// Throws EmptyCorpus when the corpus is empty or any aspect ends up with
/// fewer than 2 samples. `threads` > 1 analyzes entries in parallel; the
/// result does not depend on the thread count.
ReferenceDistribution build_reference(const std::vector<SymbolStream>& corpus,
                                      const AnalyzerConfig& cfg,
                                      const std::string& provenance, int threads = 1);

std::string reference_to_json(const ReferenceDistribution& ref);
ReferenceDistribution reference_from_json(std::string_view text);

/// Parses a {"aspect_name": weight, ...} document; aspects not mentioned get
/// weight zero.
WeightProfile weights_from_json(std::string_view text);

/// percentile/10 rounded to one decimal.
double display_score(double percentile_value);

} // namespace nsaqa

#endif
