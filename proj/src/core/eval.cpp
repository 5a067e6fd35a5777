#include "eval.hpp"

#include <algorithm>
#include <json.hpp>

#include "errors.hpp"
#include "recognition.hpp"
#include "segmentation.hpp"

namespace nsaqa {

namespace {

constexpr const char* kCategoryNames[5] = {"armstand", "rotation_type", "position",
                                           "half_somersaults", "half_twists"};
constexpr const char* kPhaseNames[4] = {"takeoff", "twist", "somersault", "entry"};

std::optional<FrameRange> phase_of(const PhaseSegmentation& seg, int phase) {
    switch (phase) {
        case 0: return seg.takeoff;
        case 1: return seg.twist;
        case 2: return seg.somersault;
        case 3: return seg.entry;
    }
    return std::nullopt;
}

} // namespace

double interval_iou(FrameRange a, FrameRange b) {
    if (a.empty() || b.empty()) return 0.0;
    const std::int64_t inter_start = std::max(a.start, b.start);
    const std::int64_t inter_end = std::min(a.end, b.end);
    const std::int64_t inter = inter_end >= inter_start ? inter_end - inter_start + 1 : 0;
    const std::int64_t uni = a.length() + b.length() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

void EvalAccumulator::add_phase(int phase, double iou) {
    PhaseStat& stat = phases_[static_cast<size_t>(phase)];
    ++stat.total;
    if (iou >= 0.5) ++stat.hit50;
    if (iou >= 0.75) ++stat.hit75;
}

void EvalAccumulator::add(const synth::GroundTruth& gt, const DiveDescriptor& predicted,
                          const PhaseSegmentation& segmentation) {
    ++n_;
    const DiveDescriptor& truth = gt.descriptor;
    if (predicted.armstand == truth.armstand) ++correct_[0];
    if (predicted.rotation_type == truth.rotation_type) ++correct_[1];
    if (predicted.position == truth.position) ++correct_[2];
    if (predicted.half_somersaults == truth.half_somersaults) ++correct_[3];
    if (predicted.half_twists == truth.half_twists) ++correct_[4];

    for (int phase = 0; phase < 4; ++phase) {
        const auto truth_range = phase_of(gt.phases, phase);
        const auto pred_range = phase_of(segmentation, phase);
        if (!truth_range && !pred_range) continue;
        if (!truth_range || !pred_range) {
            add_phase(phase, 0.0);
            continue;
        }
        add_phase(phase, interval_iou(*truth_range, *pred_range));
    }
}

void EvalAccumulator::add_failure(const synth::GroundTruth& gt) {
    ++n_;
    ++failures_;
    for (int phase = 0; phase < 4; ++phase) {
        if (phase_of(gt.phases, phase)) add_phase(phase, 0.0);
    }
}

double EvalAccumulator::accuracy(const char* category) const {
    if (n_ == 0) return 0.0;
    for (int i = 0; i < 5; ++i) {
        if (std::string(category) == kCategoryNames[i])
            return static_cast<double>(correct_[static_cast<size_t>(i)]) /
                   static_cast<double>(n_);
    }
    raise(ErrorKind::Internal, std::string("unknown accuracy category: ") + category);
}

double EvalAccumulator::aiou(double threshold) const {
    std::int64_t total = 0, hit = 0;
    for (const auto& stat : phases_) {
        total += stat.total;
        hit += threshold >= 0.75 ? stat.hit75 : stat.hit50;
    }
    return total > 0 ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

double EvalAccumulator::aiou_phase(const char* phase, double threshold) const {
    for (int i = 0; i < 4; ++i) {
        if (std::string(phase) == kPhaseNames[i]) {
            const PhaseStat& stat = phases_[static_cast<size_t>(i)];
            if (stat.total == 0) return 0.0;
            const std::int64_t hit = threshold >= 0.75 ? stat.hit75 : stat.hit50;
            return static_cast<double>(hit) / static_cast<double>(stat.total);
        }
    }
    raise(ErrorKind::Internal, std::string("unknown phase: ") + phase);
}

std::string EvalAccumulator::summary_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["n"] = n_;
    j["failures"] = failures_;
    nlohmann::ordered_json acc = nlohmann::ordered_json::object();
    for (int i = 0; i < 5; ++i)
        acc[kCategoryNames[i]] =
            n_ > 0 ? static_cast<double>(correct_[static_cast<size_t>(i)]) /
                         static_cast<double>(n_)
                   : 0.0;
    j["accuracy"] = std::move(acc);
    nlohmann::ordered_json aiou_j = nlohmann::ordered_json::object();
    nlohmann::ordered_json overall = nlohmann::ordered_json::object();
    overall["0.50"] = aiou(0.5);
    overall["0.75"] = aiou(0.75);
    aiou_j["overall"] = std::move(overall);
    for (int i = 0; i < 4; ++i) {
        const PhaseStat& stat = phases_[static_cast<size_t>(i)];
        nlohmann::ordered_json p = nlohmann::ordered_json::object();
        p["count"] = stat.total;
        p["0.50"] = stat.total > 0 ? static_cast<double>(stat.hit50) /
                                         static_cast<double>(stat.total)
                                   : 0.0;
        p["0.75"] = stat.total > 0 ? static_cast<double>(stat.hit75) /
                                         static_cast<double>(stat.total)
                                   : 0.0;
        aiou_j[kPhaseNames[i]] = std::move(p);
    }
    j["aiou"] = std::move(aiou_j);
    return j.dump(2) + "\n";
}

void evaluate_pair(EvalAccumulator& acc, const SymbolStream& s,
                   const synth::GroundTruth& gt, const AnalyzerConfig& cfg) {
    try {
        const DiveDescriptor d = recognize(s, cfg);
        const PhaseSegmentation seg = segment(s, d, cfg);
        acc.add(gt, d, seg);
    } catch (const Error&) {
        acc.add_failure(gt);
    }
}

} // namespace nsaqa
