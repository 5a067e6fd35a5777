#ifndef NSAQA_CORE_EVAL_HPP
#define NSAQA_CORE_EVAL_HPP

#include <array>
#include <cstdint>
#include <string>

#include "synth.hpp"
#include "types.hpp"

namespace nsaqa {

/// Intersection-over-union of two inclusive frame ranges.
double interval_iou(FrameRange a, FrameRange b);

/// Recognition-accuracy and segmentation-AIoU bookkeeping over a
/// ground-truth-paired corpus. AIoU@k is the share of (dive, phase) pairs
/// whose IoU reaches k; a phase present on only one side scores 0, a phase
/// absent on both sides is skipped.
class EvalAccumulator {
public:
    void add(const synth::GroundTruth& gt, const DiveDescriptor& predicted,
             const PhaseSegmentation& segmentation);
    /// A dive the analyzer failed on: wrong in every category, IoU 0 for
    /// every ground-truth phase.
    void add_failure(const synth::GroundTruth& gt);

    std::int64_t count() const { return n_; }

    /// Summary as a JSON document (see SCHEMA.md for the layout).
    std::string summary_json() const;

    double accuracy(const char* category) const;
    double aiou(double threshold) const; // pooled over phases; threshold 0.5 / 0.75
    double aiou_phase(const char* phase, double threshold) const;

private:
    struct PhaseStat {
        std::int64_t total = 0;
        std::int64_t hit50 = 0;
        std::int64_t hit75 = 0;
    };
    void add_phase(int phase, double iou);

    std::int64_t n_ = 0;
    std::int64_t failures_ = 0;
    std::array<std::int64_t, 5> correct_{}; // armstand, rotation, position, ss, tw
    std::array<PhaseStat, 4> phases_{};     // takeoff, twist, somersault, entry
};

/// Runs the analyzer (recognition + segmentation) over one pair and folds it
/// into the accumulator; analyzer errors are recorded as failures.
void evaluate_pair(EvalAccumulator& acc, const SymbolStream& s,
                   const synth::GroundTruth& gt, const AnalyzerConfig& cfg);

} // namespace nsaqa

#endif
