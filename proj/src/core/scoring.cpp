#include "scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <json.hpp>
#include <thread>

#include "errors.hpp"
#include "kinematics.hpp"
#include "recognition.hpp"
#include "segmentation.hpp"
#include "stream_io.hpp"

namespace nsaqa {

namespace {

constexpr double kDegPerRad = 180.0 / 3.14159265358979323846;

FrameRange flight_range(const PhaseSegmentation& seg) {
    return {seg.takeoff.end + 1, seg.entry.start - 1};
}

// mean of the usable left/right joint angles at one frame
std::optional<double> frame_hip_angle(const Pose& p, const AnalyzerConfig& cfg) {
    double acc = 0.0;
    int n = 0;
    auto side = [&](JointId sh, JointId hip, JointId knee) {
        if (joint_usable(p, sh, cfg) && joint_usable(p, hip, cfg) && joint_usable(p, knee, cfg)) {
            acc += joint_angle(p[sh].pt, p[hip].pt, p[knee].pt);
            ++n;
        }
    };
    side(JointId::l_shoulder, JointId::l_hip, JointId::l_knee);
    side(JointId::r_shoulder, JointId::r_hip, JointId::r_knee);
    if (n == 0) return std::nullopt;
    return acc / n;
}

std::optional<double> frame_knee_angle(const Pose& p, const AnalyzerConfig& cfg) {
    double acc = 0.0;
    int n = 0;
    auto side = [&](JointId hip, JointId knee, JointId ankle) {
        if (joint_usable(p, hip, cfg) && joint_usable(p, knee, cfg) &&
            joint_usable(p, ankle, cfg)) {
            acc += joint_angle(p[hip].pt, p[knee].pt, p[ankle].pt);
            ++n;
        }
    };
    side(JointId::l_hip, JointId::l_knee, JointId::l_ankle);
    side(JointId::r_hip, JointId::r_knee, JointId::r_ankle);
    if (n == 0) return std::nullopt;
    return acc / n;
}

std::vector<EvidenceEntry> worst_k(std::vector<EvidenceEntry> entries, size_t k) {
    std::sort(entries.begin(), entries.end(), [](const EvidenceEntry& a, const EvidenceEntry& b) {
        if (a.severity != b.severity) return a.severity > b.severity;
        return a.frame < b.frame;
    });
    if (entries.size() > k) entries.resize(k);
    return entries;
}

RawMetric mean_deviation_metric(AspectId aspect, const SymbolStream& s, FrameRange window,
                                const AnalyzerConfig& cfg, bool include_hip,
                                bool include_knee, const char* who) {
    double acc = 0.0;
    std::int64_t n = 0;
    std::vector<EvidenceEntry> evidence;
    for (const auto& frame : s.frames) {
        if (!window.contains(frame.frame_index) || !frame.pose) continue;
        const Pose& p = *frame.pose;
        double dev = 0.0;
        bool have = true;
        if (include_hip) {
            const auto hip = frame_hip_angle(p, cfg);
            if (hip) dev += 180.0 - *hip;
            else have = false;
        }
        if (include_knee) {
            const auto knee = frame_knee_angle(p, cfg);
            if (knee) dev += 180.0 - *knee;
            else have = false;
        }
        if (!have) continue;
        acc += dev;
        ++n;
        evidence.push_back({frame.frame_index, dev});
    }
    if (n == 0)
        raise(ErrorKind::NoUsablePose, std::string(who) + ": no usable pose in window");
    RawMetric m;
    m.aspect = aspect;
    m.value = acc / static_cast<double>(n);
    m.unit = MetricUnit::degrees;
    m.polarity = MetricPolarity::lower_is_better;
    m.evidence = worst_k(std::move(evidence), 3);
    return m;
}

} // namespace

DistanceCategory distance_category(double torso_lengths) {
    if (torso_lengths < kDistanceTooClose) return DistanceCategory::too_close;
    if (torso_lengths > kDistanceTooFar) return DistanceCategory::too_far;
    return DistanceCategory::good;
}

RawMetric mp_feet_apart(const SymbolStream& s, const PhaseSegmentation& seg,
                        const DiveDescriptor&, const AnalyzerConfig& cfg) {
    const FrameRange flight = flight_range(seg);
    double acc = 0.0;
    std::int64_t n = 0;
    std::vector<EvidenceEntry> evidence;
    for (const auto& frame : s.frames) {
        if (!flight.contains(frame.frame_index) || !frame.pose) continue;
        const Pose& p = *frame.pose;
        if (!joint_usable(p, JointId::pelvis, cfg) || !joint_usable(p, JointId::l_ankle, cfg) ||
            !joint_usable(p, JointId::r_ankle, cfg))
            continue;
        const Vec2 left = p[JointId::l_ankle].pt - p[JointId::pelvis].pt;
        const Vec2 right = p[JointId::r_ankle].pt - p[JointId::pelvis].pt;
        if (norm(left) == 0.0 || norm(right) == 0.0) continue;
        const double sep = angle_between(left, right);
        acc += sep;
        ++n;
        evidence.push_back({frame.frame_index, sep});
    }
    if (n == 0) raise(ErrorKind::NoUsablePose, "feet_apart: no usable pose in flight");
    RawMetric m;
    m.aspect = AspectId::feet_apart;
    m.value = acc / static_cast<double>(n);
    m.unit = MetricUnit::degrees;
    m.polarity = MetricPolarity::lower_is_better;
    m.evidence = worst_k(std::move(evidence), 3);
    return m;
}

RawMetric mp_height_off_platform(const SymbolStream& s, const PhaseSegmentation& seg,
                                 const DiveDescriptor&, const AnalyzerConfig& cfg) {
    const double torso = torso_length_reference(s, cfg);
    double best = -1e300;
    std::int64_t best_frame = -1;
    for (const auto& frame : s.frames) {
        if (frame.frame_index <= seg.takeoff.end || !frame.pose) continue;
        const Pose& p = *frame.pose;
        if (!joint_usable(p, JointId::pelvis, cfg)) continue;
        const double h = (s.platform.edge_point.y - p[JointId::pelvis].pt.y) / torso;
        if (h > best) {
            best = h;
            best_frame = frame.frame_index;
        }
    }
    if (best_frame < 0)
        raise(ErrorKind::NoUsablePose, "height_off_platform: no usable pose after takeoff");
    RawMetric m;
    m.aspect = AspectId::height_off_platform;
    m.value = best;
    m.unit = MetricUnit::torso_lengths;
    m.polarity = MetricPolarity::higher_is_better;
    m.evidence = {{best_frame, best}};
    return m;
}

RawMetric mp_distance_from_platform(const SymbolStream& s, const PhaseSegmentation& seg,
                                    const DiveDescriptor&, const AnalyzerConfig& cfg) {
    const double torso = torso_length_reference(s, cfg);
    const double dir = s.platform.pool_sign();
    const FrameRange flight = flight_range(seg);
    double best = 1e300;
    std::int64_t best_frame = -1;
    for (const auto& frame : s.frames) {
        if (!flight.contains(frame.frame_index) || !frame.pose) continue;
        const Pose& p = *frame.pose;
        for (int i = 0; i < kJointCount; ++i) {
            const Joint& joint = p.joints[static_cast<size_t>(i)];
            if (joint.confidence < cfg.min_confidence) continue;
            const double d = dir * (joint.pt.x - s.platform.edge_point.x) / torso;
            if (d < best) {
                best = d;
                best_frame = frame.frame_index;
            }
        }
    }
    if (best_frame < 0)
        raise(ErrorKind::NoUsablePose, "distance_from_platform: no usable pose in flight");
    RawMetric m;
    m.aspect = AspectId::distance_from_platform;
    m.value = best;
    m.unit = MetricUnit::torso_lengths;
    m.polarity = MetricPolarity::band_is_better;
    m.evidence = {{best_frame, best}};
    return m;
}

RawMetric mp_somersault_tightness(const SymbolStream& s, const PhaseSegmentation& seg,
                                  const DiveDescriptor& d, const AnalyzerConfig& cfg) {
    if (!seg.somersault)
        raise(ErrorKind::PhaseAbsent, "somersault_tightness: no somersault phase");
    const bool tuck = d.position == BodyPosition::tuck;
    double acc = 0.0;
    std::int64_t n = 0;
    std::vector<EvidenceEntry> evidence;
    for (const auto& frame : s.frames) {
        if (!seg.somersault->contains(frame.frame_index) || !frame.pose) continue;
        const auto hip = frame_hip_angle(*frame.pose, cfg);
        if (!hip) continue;
        double v = *hip;
        if (tuck) {
            const auto knee = frame_knee_angle(*frame.pose, cfg);
            if (!knee) continue;
            v = 0.5 * (v + *knee);
        }
        acc += v;
        ++n;
        evidence.push_back({frame.frame_index, v});
    }
    if (n == 0)
        raise(ErrorKind::NoUsablePose, "somersault_tightness: no usable pose in phase");
    RawMetric m;
    m.aspect = AspectId::somersault_tightness;
    m.value = acc / static_cast<double>(n);
    m.unit = MetricUnit::degrees;
    m.polarity = MetricPolarity::lower_is_better;
    m.evidence = worst_k(std::move(evidence), 1); // loosest frame
    return m;
}

RawMetric mp_knee_straightness(const SymbolStream& s, const PhaseSegmentation& seg,
                               const DiveDescriptor&, const AnalyzerConfig& cfg) {
    const FrameRange flight = flight_range(seg);
    if (flight.empty()) raise(ErrorKind::PhaseAbsent, "knee_straightness: empty flight");
    return mean_deviation_metric(AspectId::knee_straightness, s, flight, cfg,
                                 /*hip=*/false, /*knee=*/true, "knee_straightness");
}

RawMetric mp_twist_tightness(const SymbolStream& s, const PhaseSegmentation& seg,
                             const DiveDescriptor&, const AnalyzerConfig& cfg) {
    if (!seg.twist) raise(ErrorKind::PhaseAbsent, "twist_tightness: no twist phase");
    return mean_deviation_metric(AspectId::twist_tightness, s, *seg.twist, cfg,
                                 /*hip=*/true, /*knee=*/true, "twist_tightness");
}

RawMetric mp_verticalness(const SymbolStream& s, const PhaseSegmentation& seg,
                          const DiveDescriptor&, const AnalyzerConfig& cfg) {
    const FrameRange window{seg.entry.start - 2, seg.entry.start + 2};
    double value = 0.0;
    std::int64_t found = -1;
    for (const auto& frame : s.frames) {
        if (!window.contains(frame.frame_index) || !frame.pose) continue;
        const Pose& p = *frame.pose;
        if (!joint_usable(p, JointId::head_top, cfg) ||
            !joint_usable(p, JointId::l_ankle, cfg) || !joint_usable(p, JointId::r_ankle, cfg))
            continue;
        const Vec2 mid = 0.5 * (p[JointId::l_ankle].pt + p[JointId::r_ankle].pt);
        const Vec2 line = mid - p[JointId::head_top].pt;
        if (norm(line) == 0.0) continue;
        value = std::atan2(std::fabs(line.x), std::fabs(line.y)) * kDegPerRad;
        found = frame.frame_index; // keep the last visible one
    }
    if (found < 0)
        raise(ErrorKind::NoUsablePose, "verticalness: no usable pose around entry");
    RawMetric m;
    m.aspect = AspectId::verticalness;
    m.value = value;
    m.unit = MetricUnit::degrees;
    m.polarity = MetricPolarity::lower_is_better;
    m.evidence = {{found, value}};
    return m;
}

RawMetric mp_entry_straightness(const SymbolStream& s, const PhaseSegmentation& seg,
                                const DiveDescriptor&, const AnalyzerConfig& cfg) {
    const FrameRange window{seg.entry.start - 2, seg.entry.start + 2};
    return mean_deviation_metric(AspectId::entry_straightness, s, window, cfg,
                                 /*hip=*/true, /*knee=*/true, "entry_straightness");
}

RawMetric mp_splash_size(const SymbolStream& s, const PhaseSegmentation& seg,
                         const DiveDescriptor&, const AnalyzerConfig&) {
    double best = 0.0;
    std::int64_t best_frame = -1;
    for (const auto& frame : s.frames) {
        if (!seg.entry.contains(frame.frame_index) || !frame.splash) continue;
        const double fraction = frame.splash->area / (s.frame_width * s.frame_height);
        if (fraction > best) {
            best = fraction;
            best_frame = frame.frame_index;
        }
    }
    RawMetric m;
    m.aspect = AspectId::splash_size;
    m.value = best; // no splash observed is a perfect 0
    m.unit = MetricUnit::fraction;
    m.polarity = MetricPolarity::lower_is_better;
    if (best_frame >= 0) m.evidence = {{best_frame, best}};
    return m;
}

RawMetric run_microprogram(AspectId aspect, const SymbolStream& s,
                           const PhaseSegmentation& seg, const DiveDescriptor& d,
                           const AnalyzerConfig& cfg) {
    switch (aspect) {
        case AspectId::feet_apart: return mp_feet_apart(s, seg, d, cfg);
        case AspectId::height_off_platform: return mp_height_off_platform(s, seg, d, cfg);
        case AspectId::distance_from_platform:
            return mp_distance_from_platform(s, seg, d, cfg);
        case AspectId::somersault_tightness: return mp_somersault_tightness(s, seg, d, cfg);
        case AspectId::knee_straightness: return mp_knee_straightness(s, seg, d, cfg);
        case AspectId::twist_tightness: return mp_twist_tightness(s, seg, d, cfg);
        case AspectId::verticalness: return mp_verticalness(s, seg, d, cfg);
        case AspectId::entry_straightness: return mp_entry_straightness(s, seg, d, cfg);
        case AspectId::splash_size: return mp_splash_size(s, seg, d, cfg);
    }
    raise(ErrorKind::UnknownAspect, "run_microprogram: unknown aspect");
}

std::set<AspectId> meta_select(const DiveDescriptor& d, const PhaseSegmentation& seg) {
    std::set<AspectId> selected;
    for (int i = 0; i < kAspectCount; ++i) selected.insert(static_cast<AspectId>(i));
    if (d.position == BodyPosition::tuck) selected.erase(AspectId::knee_straightness);
    if (d.half_twists == 0 || !seg.twist) selected.erase(AspectId::twist_tightness);
    if (d.position == BodyPosition::straight || !seg.somersault)
        selected.erase(AspectId::somersault_tightness);
    return selected;
}

double percentile(const RawMetric& raw, const ReferenceDistribution& ref) {
    const auto& samples = ref.samples(raw.aspect);
    if (samples.empty())
        raise(ErrorKind::UnknownAspect,
              std::string("percentile: reference has no samples for ") +
                  aspect_name(raw.aspect));
    std::int64_t worse = 0, ties = 0;
    if (raw.polarity == MetricPolarity::band_is_better) {
        const double q = std::fabs(raw.value - kDistanceBandCenter);
        for (double sample : samples) {
            const double d = std::fabs(sample - kDistanceBandCenter);
            if (d > q) ++worse;
            else if (d == q) ++ties;
        }
    } else if (raw.polarity == MetricPolarity::lower_is_better) {
        for (double sample : samples) {
            if (sample > raw.value) ++worse;
            else if (sample == raw.value) ++ties;
        }
    } else {
        for (double sample : samples) {
            if (sample < raw.value) ++worse;
            else if (sample == raw.value) ++ties;
        }
    }
    const double p = 100.0 * (static_cast<double>(worse) + 0.5 * static_cast<double>(ties)) /
                     static_cast<double>(samples.size());
    return std::clamp(p, 0.0, 100.0);
}

double display_score(double percentile_value) {
    return std::round(percentile_value) / 10.0;
}

WeightProfile WeightProfile::uniform() {
    WeightProfile w;
    w.weights.fill(1.0);
    return w;
}

double aggregate(const std::vector<AspectScore>& scores,
                 const std::optional<WeightProfile>& weights) {
    double acc = 0.0, wsum = 0.0;
    std::int64_t n = 0;
    for (const auto& score : scores) {
        if (!score.applicable) continue;
        ++n;
        const double w =
            weights ? weights->weights[static_cast<size_t>(score.aspect)] : 1.0;
        if (w < 0.0)
            raise(ErrorKind::SchemaViolation, "aggregate: negative weight");
        acc += w * score.display;
        wsum += w;
    }
    if (n == 0) raise(ErrorKind::NoApplicableAspects, "aggregate: no applicable aspects");
    if (wsum == 0.0)
        raise(ErrorKind::AllZeroWeights,
              "aggregate: weights are zero over every applicable aspect");
    return std::round(acc / wsum * 10.0) / 10.0;
}

std::vector<AspectScore> score_aspects(const SymbolStream& s, const DiveDescriptor& d,
                                       const PhaseSegmentation& seg,
                                       const ReferenceDistribution& ref,
                                       const AnalyzerConfig& cfg) {
    const std::set<AspectId> selected = meta_select(d, seg);
    std::vector<AspectScore> out;
    out.reserve(kAspectCount);
    for (int i = 0; i < kAspectCount; ++i) {
        const AspectId aspect = static_cast<AspectId>(i);
        AspectScore score;
        score.aspect = aspect;
        if (selected.count(aspect)) {
            try {
                RawMetric raw = run_microprogram(aspect, s, seg, d, cfg);
                score.raw = raw;
                score.percentile = percentile(raw, ref);
                score.display = display_score(score.percentile);
                score.applicable = true;
                if (aspect == AspectId::distance_from_platform)
                    score.category = distance_category(raw.value);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::PhaseAbsent) throw;
                score.applicable = false; // reported as N/A, never as zero
            }
        }
        out.push_back(std::move(score));
    }
    return out;
}

namespace {

struct CorpusSample {
    bool ok = false;
    std::array<std::optional<double>, kAspectCount> values{};
};

CorpusSample collect_one(const SymbolStream& s, const AnalyzerConfig& cfg) {
    CorpusSample sample;
    try {
        const DiveDescriptor d = recognize(s, cfg);
        const PhaseSegmentation seg = segment(s, d, cfg);
        const SymbolStream stream = interpolate_poses(s, cfg.max_gap);
        for (AspectId aspect : meta_select(d, seg)) {
            try {
                sample.values[static_cast<size_t>(aspect)] =
                    run_microprogram(aspect, stream, seg, d, cfg).value;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::PhaseAbsent &&
                    e.kind() != ErrorKind::NoUsablePose)
                    throw;
            }
        }
        sample.ok = true;
    } catch (const Error&) {
        sample.ok = false;
    }
    return sample;
}

} // namespace

ReferenceDistribution build_reference(const std::vector<SymbolStream>& corpus,
                                      const AnalyzerConfig& cfg,
                                      const std::string& provenance, int threads) {
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, "build_reference: empty corpus");

    // deterministic order regardless of input or thread count
    std::vector<size_t> order(corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (corpus[a].clip_id != corpus[b].clip_id) return corpus[a].clip_id < corpus[b].clip_id;
        return a < b;
    });

    std::vector<CorpusSample> samples(corpus.size());
    const int workers = std::max(1, threads);
    if (workers == 1) {
        for (size_t i = 0; i < corpus.size(); ++i) samples[i] = collect_one(corpus[i], cfg);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < corpus.size(); i = next.fetch_add(1))
                    samples[i] = collect_one(corpus[i], cfg);
            });
        }
        for (auto& th : pool) th.join();
    }

    ReferenceDistribution ref;
    ref.metadata.name = "nsaqa-reference";
    ref.metadata.provenance = provenance;
    for (size_t idx : order) {
        const CorpusSample& sample = samples[idx];
        if (!sample.ok) {
            ++ref.metadata.skipped;
            continue;
        }
        ++ref.metadata.sample_count;
        for (int i = 0; i < kAspectCount; ++i) {
            if (sample.values[static_cast<size_t>(i)])
                ref.aspects[static_cast<size_t>(i)].push_back(
                    *sample.values[static_cast<size_t>(i)]);
        }
    }
    for (int i = 0; i < kAspectCount; ++i) {
        auto& arr = ref.aspects[static_cast<size_t>(i)];
        if (arr.size() < 2)
            raise(ErrorKind::EmptyCorpus,
                  std::string("build_reference: fewer than 2 samples for aspect '") +
                      aspect_name(static_cast<AspectId>(i)) + "'");
        std::sort(arr.begin(), arr.end());
    }
    return ref;
}

namespace {
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
} // namespace

std::string reference_to_json(const ReferenceDistribution& ref) {
    ordered_json j = ordered_json::object();
    ordered_json meta = ordered_json::object();
    meta["name"] = ref.metadata.name;
    meta["sample_count"] = ref.metadata.sample_count;
    meta["provenance"] = ref.metadata.provenance;
    meta["skipped"] = ref.metadata.skipped;
    j["metadata"] = std::move(meta);
    ordered_json aspects = ordered_json::object();
    for (int i = 0; i < kAspectCount; ++i)
        aspects[aspect_name(static_cast<AspectId>(i))] = ref.aspects[static_cast<size_t>(i)];
    j["aspects"] = std::move(aspects);
    return j.dump(2) + "\n";
}

ReferenceDistribution reference_from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorKind::MalformedDocument, "reference: invalid JSON");
    ReferenceDistribution ref;
    try {
        const json& meta = j.at("metadata");
        ref.metadata.name = meta.at("name").get<std::string>();
        ref.metadata.sample_count = meta.at("sample_count").get<std::int64_t>();
        ref.metadata.provenance = meta.at("provenance").get<std::string>();
        if (meta.contains("skipped")) ref.metadata.skipped = meta.at("skipped").get<std::int64_t>();
        const json& aspects = j.at("aspects");
        for (int i = 0; i < kAspectCount; ++i) {
            const char* name = aspect_name(static_cast<AspectId>(i));
            const json& arr = aspects.at(name);
            if (!arr.is_array())
                raise(ErrorKind::SchemaViolation,
                      std::string("reference: aspect '") + name + "' must be an array");
            auto& out = ref.aspects[static_cast<size_t>(i)];
            for (const auto& v : arr) out.push_back(v.get<double>());
            if (out.size() < 2)
                raise(ErrorKind::InvariantViolation,
                      std::string("reference: aspect '") + name + "' needs at least 2 samples");
            if (!std::is_sorted(out.begin(), out.end()))
                raise(ErrorKind::InvariantViolation,
                      std::string("reference: aspect '") + name + "' is not sorted");
        }
    } catch (const json::exception& e) {
        raise(ErrorKind::SchemaViolation, std::string("reference: ") + e.what());
    }
    return ref;
}

WeightProfile weights_from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorKind::MalformedDocument, "weights: invalid JSON object");
    WeightProfile w;
    w.weights.fill(0.0);
    for (const auto& [key, value] : j.items()) {
        const auto aspect = aspect_from_name(key);
        if (!aspect)
            raise(ErrorKind::SchemaViolation, "weights: unknown aspect '" + key + "'");
        if (!value.is_number() || value.get<double>() < 0.0)
            raise(ErrorKind::SchemaViolation,
                  "weights: aspect '" + key + "' must be a non-negative number");
        w.weights[static_cast<size_t>(*aspect)] = value.get<double>();
    }
    return w;
}

} // namespace nsaqa
