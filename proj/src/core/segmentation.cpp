#include "segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "kinematics.hpp"
#include "recognition.hpp"
#include "stream_io.hpp"

namespace nsaqa {

namespace {

constexpr double kRotationEpsDeg = 8.0; // cumulative-angle margin at the range ends

std::int64_t llround_clamped(double v, std::int64_t lo, std::int64_t hi) {
    return std::clamp(static_cast<std::int64_t>(std::llround(v)), lo, hi);
}

} // namespace

std::int64_t detect_takeoff_end(const SymbolStream& s, const AnalyzerConfig& cfg) {
    const double torso = torso_length_reference(s, cfg);
    const double threshold = cfg.takeoff_distance_threshold * torso;
    const double dir = s.platform.pool_sign();
    bool any_ankle = false;
    for (const auto& frame : s.frames) {
        if (!frame.pose) continue;
        const Pose& p = *frame.pose;
        double nearest = 1e300;
        bool found = false;
        for (JointId id : {JointId::r_ankle, JointId::l_ankle}) {
            if (!joint_usable(p, id, cfg)) continue;
            nearest = std::min(nearest, dir * (p[id].pt.x - s.platform.edge_point.x));
            found = true;
        }
        if (!found) continue;
        any_ankle = true;
        if (nearest > threshold) return frame.frame_index;
    }
    if (!any_ankle)
        raise(ErrorKind::NoUsablePose, "detect_takeoff_end: no usable ankles in stream");
    raise(ErrorKind::NeverLeavesPlatform,
          "detect_takeoff_end: no frame clears " +
              std::to_string(cfg.takeoff_distance_threshold) +
              " torso-lengths past the platform edge");
}

FrameRange detect_entry(const SymbolStream& s, const AnalyzerConfig& cfg) {
    const double torso = torso_length_reference(s, cfg);
    std::optional<std::int64_t> near_water;
    std::optional<std::int64_t> first_splash;
    std::optional<std::int64_t> last_splash;
    for (const auto& frame : s.frames) {
        if (!near_water && frame.pose &&
            joint_usable(*frame.pose, JointId::pelvis, cfg) &&
            (*frame.pose)[JointId::pelvis].pt.y >= s.platform.water_y - torso)
            near_water = frame.frame_index;
        if (frame.splash) {
            if (!first_splash) first_splash = frame.frame_index;
            last_splash = frame.frame_index;
        }
    }
    std::optional<std::int64_t> start = near_water;
    if (first_splash && (!start || *first_splash < *start)) start = first_splash;
    if (!start)
        raise(ErrorKind::NoEntryDetected,
              "detect_entry: diver never approaches the water and no splash was seen");
    const std::int64_t end = last_splash ? *last_splash : s.frames.back().frame_index;
    return {*start, std::max(end, *start)};
}

std::optional<FrameRange> compute_somersault_range(const SymbolStream& s, FrameRange flight,
                                                   const AnalyzerConfig& cfg) {
    std::vector<std::int64_t> frames;
    std::vector<Vec2> torsos;
    for (const auto& frame : s.frames) {
        if (!flight.contains(frame.frame_index)) continue;
        if (!frame.pose) continue;
        const Pose& p = *frame.pose;
        if (!joint_usable(p, JointId::pelvis, cfg) || !joint_usable(p, JointId::thorax, cfg))
            continue;
        const Vec2 v = to_math_vec(p[JointId::thorax].pt - p[JointId::pelvis].pt);
        if (norm(v) == 0.0) continue;
        frames.push_back(frame.frame_index);
        torsos.push_back(v);
    }
    if (torsos.size() < 3) return std::nullopt;

    std::vector<double> theta = unwrap_directions(torsos);
    // light smoothing before reading cumulative progress
    std::vector<double> smooth(theta.size());
    for (size_t i = 0; i < theta.size(); ++i) {
        const size_t lo = i > 0 ? i - 1 : 0;
        const size_t hi = std::min(theta.size() - 1, i + 1);
        double acc = 0.0;
        for (size_t k = lo; k <= hi; ++k) acc += theta[k];
        smooth[i] = acc / static_cast<double>(hi - lo + 1);
    }
    const double total_signed = smooth.back() - smooth.front();
    if (std::fabs(total_signed) < 2.0 * kRotationEpsDeg) return std::nullopt;
    const double dir = total_signed > 0.0 ? 1.0 : -1.0;

    std::vector<double> progress(smooth.size());
    for (size_t i = 0; i < smooth.size(); ++i) progress[i] = dir * (smooth[i] - smooth.front());
    const double total = progress.back();

    size_t i0 = 0;
    while (i0 < progress.size() && progress[i0] < kRotationEpsDeg) ++i0;
    size_t i1 = progress.size() - 1;
    while (i1 > 0 && progress[i1] > total - kRotationEpsDeg) --i1;
    if (i0 >= progress.size() || i1 <= i0) return std::nullopt;

    double start_f = static_cast<double>(frames[i0]);
    if (i0 > 0) {
        const double slope = (progress[i0] - progress[i0 - 1]) /
                             static_cast<double>(frames[i0] - frames[i0 - 1]);
        if (slope > 0.0) start_f -= progress[i0] / slope;
    }
    double end_f = static_cast<double>(frames[i1]);
    if (i1 + 1 < progress.size()) {
        const double slope = (progress[i1 + 1] - progress[i1]) /
                             static_cast<double>(frames[i1 + 1] - frames[i1]);
        if (slope > 0.0) end_f += (total - progress[i1]) / slope;
    }
    FrameRange out{llround_clamped(start_f, flight.start, flight.end),
                   llround_clamped(end_f, flight.start, flight.end)};
    if (out.empty()) return std::nullopt;
    return out;
}

std::optional<FrameRange> compute_twist_range(const SymbolStream& s,
                                              std::int64_t takeoff_end, FrameRange flight,
                                              const AnalyzerConfig& cfg) {
    const TwistTrace trace = trace_twist_petals(s, takeoff_end, cfg);
    if (trace.petals.empty()) return std::nullopt;

    const auto& first = trace.petals.front();
    const auto& last = trace.petals.back();

    double start_f = static_cast<double>(trace.frames[first.rise_pos]);
    if (first.rise_pos > 0) {
        const size_t i = first.rise_pos;
        const double slope =
            (trace.magnitude[i] - trace.magnitude[i - 1]) /
            static_cast<double>(trace.frames[i] - trace.frames[i - 1]);
        if (slope > 0.0) start_f -= trace.magnitude[i] / slope;
    }
    double end_f = static_cast<double>(trace.frames[last.fall_pos]);
    if (last.fall_pos > 0) {
        const size_t i = last.fall_pos;
        const double slope =
            (trace.magnitude[i - 1] - trace.magnitude[i]) /
            static_cast<double>(trace.frames[i] - trace.frames[i - 1]);
        if (slope > 0.0) end_f += trace.magnitude[i] / slope;
    }
    FrameRange out{llround_clamped(start_f, flight.start, flight.end),
                   llround_clamped(end_f, flight.start, flight.end)};
    if (out.empty()) return std::nullopt;
    return out;
}

PhaseSegmentation segment(const SymbolStream& s, const DiveDescriptor& d,
                          const AnalyzerConfig& cfg) {
    validate_config(cfg);
    const SymbolStream stream = interpolate_poses(s, cfg.max_gap);

    const std::int64_t takeoff_end = detect_takeoff_end(stream, cfg);
    const FrameRange entry = detect_entry(stream, cfg);
    if (entry.start <= takeoff_end)
        raise(ErrorKind::InvariantViolation,
              "segment: entry begins at frame " + std::to_string(entry.start) +
                  ", before the takeoff phase ends");

    PhaseSegmentation seg;
    seg.takeoff = {stream.frames.front().frame_index, takeoff_end - 1};
    seg.entry = entry;
    const FrameRange flight{takeoff_end, entry.start - 1};
    if (d.half_somersaults > 0)
        seg.somersault = compute_somersault_range(stream, flight, cfg);
    if (d.half_twists > 0)
        seg.twist = compute_twist_range(stream, takeoff_end, flight, cfg);
    return seg;
}

} // namespace nsaqa
