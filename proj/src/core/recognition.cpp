#include "recognition.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "kinematics.hpp"
#include "segmentation.hpp"
#include "stream_io.hpp"

namespace nsaqa {

namespace {

constexpr double kDegPerRad = 180.0 / 3.14159265358979323846;
// Hip spans that never reach this fraction of a torso length are profile
// noise, not twisting.
// TODO: expose the hip floor and median window in AnalyzerConfig if real
// detector noise turns out to need different values than the synthetic model.
constexpr double kMinHipReferenceTorso = 0.25;
constexpr size_t kPetalMedianWindow = 3;
constexpr double kFacingDeadbandDeg = 5.0;

bool torso_usable(const FrameSymbols& frame, const AnalyzerConfig& cfg) {
    return frame.pose && joint_usable(*frame.pose, JointId::pelvis, cfg) &&
           joint_usable(*frame.pose, JointId::thorax, cfg);
}

Vec2 torso_vec_math(const Pose& pose) {
    return to_math_vec(pose[JointId::thorax].pt - pose[JointId::pelvis].pt);
}

} // namespace

bool detect_armstand(const SymbolStream& s, std::int64_t takeoff_end,
                     const AnalyzerConfig& cfg) {
    std::int64_t inverted = 0, usable = 0;
    for (const auto& frame : s.frames) {
        if (frame.frame_index >= takeoff_end) break;
        if (!torso_usable(frame, cfg)) continue;
        ++usable;
        if (torso_vec_math(*frame.pose).y < 0.0) ++inverted;
    }
    if (usable == 0)
        raise(ErrorKind::NoUsablePose, "detect_armstand: no usable pose during takeoff");
    return inverted * 2 > usable;
}

SomersaultTrace trace_half_somersaults(const SymbolStream& s, std::int64_t takeoff_end,
                                       bool armstand, const AnalyzerConfig& cfg) {
    const Vec2 vertical_up{0.0, 1.0};
    const Vec2 vertical_down{0.0, -1.0};
    SomersaultTrace trace;
    std::int64_t usable = 0;
    for (const auto& frame : s.frames) {
        if (frame.frame_index < takeoff_end) continue;
        if (!torso_usable(frame, cfg)) continue;
        const Vec2 torso = torso_vec_math(*frame.pose);
        if (norm(torso) == 0.0) continue;
        ++usable;
        const bool even = trace.count % 2 == 0;
        const Vec2 target = (armstand ? !even : even) ? vertical_down : vertical_up;
        if (angle_between(torso, target) <= cfg.som_angle_threshold_deg) {
            ++trace.count;
            trace.increment_frames.push_back(frame.frame_index);
        }
    }
    if (usable == 0)
        raise(ErrorKind::NoUsablePose,
              "count_half_somersaults: no usable pose after takeoff");
    return trace;
}

int count_half_somersaults(const SymbolStream& s, std::int64_t takeoff_end, bool armstand,
                           const AnalyzerConfig& cfg) {
    return trace_half_somersaults(s, takeoff_end, armstand, cfg).count;
}

TwistTrace trace_twist_petals(const SymbolStream& s, std::int64_t takeoff_end,
                              const AnalyzerConfig& cfg) {
    TwistTrace trace;
    std::vector<double> raw;
    for (const auto& frame : s.frames) {
        if (frame.frame_index < takeoff_end) continue;
        if (!frame.pose) continue;
        const Pose& p = *frame.pose;
        if (!joint_usable(p, JointId::l_hip, cfg) || !joint_usable(p, JointId::r_hip, cfg))
            continue;
        trace.frames.push_back(frame.frame_index);
        raw.push_back(norm(p[JointId::l_hip].pt - p[JointId::r_hip].pt));
    }
    if (raw.empty())
        raise(ErrorKind::NoUsablePose, "count_half_twists: no usable hips after takeoff");

    // median window against single-frame pose spikes
    trace.magnitude.resize(raw.size());
    const size_t half = kPetalMedianWindow / 2;
    std::vector<double> window;
    for (size_t i = 0; i < raw.size(); ++i) {
        const size_t lo = i >= half ? i - half : 0;
        const size_t hi = std::min(raw.size() - 1, i + half);
        window.assign(raw.begin() + static_cast<std::ptrdiff_t>(lo),
                      raw.begin() + static_cast<std::ptrdiff_t>(hi + 1));
        trace.magnitude[i] = median(window);
    }

    const double torso = torso_length_reference(s, cfg);
    const double peak = *std::max_element(trace.magnitude.begin(), trace.magnitude.end());
    if (peak < kMinHipReferenceTorso * torso) {
        trace.active = false;
        trace.reference_length = 0.0;
        return trace; // hips stay in profile: no twisting
    }
    trace.active = true;
    trace.reference_length = peak;

    const double inner = cfg.petal_inner_radius * trace.reference_length;
    const double outer = cfg.petal_outer_radius * trace.reference_length;
    bool above = false;
    size_t rise_pos = 0;
    double apex = 0.0;
    for (size_t i = 0; i < trace.magnitude.size(); ++i) {
        const double m = trace.magnitude[i];
        if (!above) {
            if (m >= inner && i > 0) { // an opening excursion has no observed rise
                above = true;
                rise_pos = i;
                apex = m;
            }
        } else {
            apex = std::max(apex, m);
            if (m < inner) {
                if (apex <= outer)
                    trace.petals.push_back({rise_pos, i, apex});
                above = false;
            }
        }
    }
    return trace;
}

int count_half_twists(const SymbolStream& s, std::int64_t takeoff_end,
                      const AnalyzerConfig& cfg) {
    return trace_twist_petals(s, takeoff_end, cfg).count();
}

namespace {

// Signed lean of a roughly vertical body vector, degrees; positive tips
// toward +x regardless of whether the vector points up or down.
double lean_deg(Vec2 v) { return std::atan2(v.x, std::fabs(v.y)) * kDegPerRad; }

double measure_facing_lean(const SymbolStream& s, std::int64_t takeoff_end, bool armstand,
                           const AnalyzerConfig& cfg) {
    std::vector<double> leans;
    std::int64_t seen = 0;
    for (auto it = s.frames.rbegin(); it != s.frames.rend(); ++it) {
        if (it->frame_index >= takeoff_end) continue;
        if (seen >= 5) break;
        ++seen;
        if (!it->pose) continue;
        const Pose& p = *it->pose;
        if (joint_usable(p, JointId::pelvis, cfg) && joint_usable(p, JointId::thorax, cfg)) {
            const Vec2 v = torso_vec_math(p);
            if (norm(v) > 0.0) leans.push_back(lean_deg(v));
        }
        if (joint_usable(p, JointId::upper_neck, cfg) &&
            joint_usable(p, JointId::head_top, cfg)) {
            const Vec2 v = to_math_vec(p[JointId::head_top].pt - p[JointId::upper_neck].pt);
            if (norm(v) > 0.0) leans.push_back(lean_deg(v));
        }
    }
    if (leans.empty())
        raise(ErrorKind::NoUsablePose,
              "classify_rotation_type: no usable pose near takeoff end");
    double mean = 0.0;
    for (double l : leans) mean += l;
    mean /= static_cast<double>(leans.size());
    // an inverted body reads its lean mirrored
    return armstand ? -mean : mean;
}

RotationType classify_with_trace(const SymbolStream& s, std::int64_t takeoff_end,
                                 bool armstand, const SomersaultTrace& trace,
                                 const AnalyzerConfig& cfg) {
    const double lean = measure_facing_lean(s, takeoff_end, armstand, cfg);
    if (std::fabs(lean) < kFacingDeadbandDeg)
        raise(ErrorKind::AmbiguousFacing,
              "classify_rotation_type: facing lean of " + std::to_string(lean) +
                  " degrees is inside the dead-band");
    const double facing_x = lean > 0.0 ? 1.0 : -1.0;
    const double pool_x = s.platform.pool_sign();
    const bool faces_pool = facing_x == pool_x;

    // rotation sign over the window ending at the first counted half-somersault
    std::int64_t window_end =
        trace.increment_frames.empty() ? s.frames.back().frame_index
                                       : trace.increment_frames.front();
    // keep a readable window even when the detected takeoff end slips into
    // the rotation itself
    window_end = std::max(window_end, takeoff_end + 6);
    std::vector<Vec2> torsos;
    for (const auto& frame : s.frames) {
        if (frame.frame_index < takeoff_end || frame.frame_index > window_end) continue;
        if (!torso_usable(frame, cfg)) continue;
        torsos.push_back(torso_vec_math(*frame.pose));
    }
    if (torsos.size() < 2)
        raise(ErrorKind::NoUsablePose,
              "classify_rotation_type: not enough poses to read the rotation direction");
    const double rotation = accumulate_rotation(torsos);
    const bool ccw = rotation >= 0.0;
    // counterclockwise motion carries an upright torso tip toward -x and an
    // inverted one toward +x
    const double tip_moving_x = ccw == armstand ? 1.0 : -1.0;
    const bool toward_pool = tip_moving_x == pool_x;

    if (faces_pool) return toward_pool ? RotationType::forward : RotationType::reverse;
    return toward_pool ? RotationType::inward : RotationType::backward;
}

} // namespace

RotationType classify_rotation_type(const SymbolStream& s, std::int64_t takeoff_end,
                                    bool armstand, const AnalyzerConfig& cfg) {
    return classify_with_trace(s, takeoff_end, armstand,
                               trace_half_somersaults(s, takeoff_end, armstand, cfg), cfg);
}

BodyPosition classify_position(const SymbolStream& s, FrameRange somersault_range,
                               const AnalyzerConfig& cfg) {
    if (somersault_range.empty())
        raise(ErrorKind::NoUsablePose, "classify_position: empty somersault range");
    const std::int64_t quarter = somersault_range.length() / 4;
    const FrameRange mid{somersault_range.start + quarter, somersault_range.end - quarter};

    std::vector<double> hip_angles, knee_angles;
    for (const auto& frame : s.frames) {
        if (!mid.contains(frame.frame_index) || !frame.pose) continue;
        const Pose& p = *frame.pose;
        auto side = [&](JointId sh, JointId hip, JointId knee, JointId ankle,
                        std::vector<double>& hips, std::vector<double>& knees) {
            if (joint_usable(p, sh, cfg) && joint_usable(p, hip, cfg) &&
                joint_usable(p, knee, cfg))
                hips.push_back(joint_angle(p[sh].pt, p[hip].pt, p[knee].pt));
            if (joint_usable(p, hip, cfg) && joint_usable(p, knee, cfg) &&
                joint_usable(p, ankle, cfg))
                knees.push_back(joint_angle(p[hip].pt, p[knee].pt, p[ankle].pt));
        };
        std::vector<double> hips, knees;
        side(JointId::l_shoulder, JointId::l_hip, JointId::l_knee, JointId::l_ankle, hips,
             knees);
        side(JointId::r_shoulder, JointId::r_hip, JointId::r_knee, JointId::r_ankle, hips,
             knees);
        if (!hips.empty())
            hip_angles.push_back(median(hips));
        if (!knees.empty())
            knee_angles.push_back(median(knees));
    }
    if (hip_angles.empty() || knee_angles.empty())
        raise(ErrorKind::NoUsablePose,
              "classify_position: no usable pose in the somersault core");
    const double hip = median(std::move(hip_angles));
    const double knee = median(std::move(knee_angles));

    if (knee < cfg.position_knee_tuck_deg && hip < cfg.position_hip_tuck_deg)
        return BodyPosition::tuck;
    if (hip < cfg.position_hip_pike_deg && knee >= cfg.position_straight_deg)
        return BodyPosition::pike;
    if (hip >= cfg.position_straight_deg && knee >= cfg.position_straight_deg)
        return BodyPosition::straight;
    return BodyPosition::free_position;
}

DiveDescriptor recognize(const SymbolStream& s, const AnalyzerConfig& cfg) {
    validate_config(cfg);
    const SymbolStream stream = interpolate_poses(s, cfg.max_gap);

    DiveDescriptor d;
    const std::int64_t takeoff_end = detect_takeoff_end(stream, cfg);
    d.armstand = detect_armstand(stream, takeoff_end, cfg);
    const SomersaultTrace trace =
        trace_half_somersaults(stream, takeoff_end, d.armstand, cfg);
    d.half_somersaults = trace.count;
    d.half_twists = count_half_twists(stream, takeoff_end, cfg);
    d.rotation_type = classify_with_trace(stream, takeoff_end, d.armstand, trace, cfg);

    const FrameRange entry = detect_entry(stream, cfg);
    const FrameRange flight{takeoff_end, entry.start - 1};
    const auto som_range = compute_somersault_range(stream, flight, cfg);
    d.position = classify_position(stream, som_range.value_or(flight), cfg);
    return d;
}

} // namespace nsaqa
