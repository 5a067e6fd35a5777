#ifndef NSAQA_TESTS_HELPERS_HPP
#define NSAQA_TESTS_HELPERS_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "core/types.hpp"

namespace nsaqa::testing {

// A plausible standing skeleton: pelvis at `pelvis`, torso length `torso`
// pixels, feet below, head above. Individual joints can be moved afterwards.
inline Pose standing_pose(Vec2 pelvis, double torso = 50.0) {
    Pose p;
    auto put = [&](JointId id, double dx, double dy) {
        p[id] = Joint{{pelvis.x + dx, pelvis.y + dy}, 1.0};
    };
    const double t = torso;
    put(JointId::pelvis, 0, 0);
    put(JointId::thorax, 0, -t);
    put(JointId::upper_neck, 0, -1.22 * t);
    put(JointId::head_top, 0, -1.55 * t);
    put(JointId::r_shoulder, -0.08 * t, -t);
    put(JointId::l_shoulder, 0.08 * t, -t);
    put(JointId::r_elbow, -0.1 * t, -0.6 * t);
    put(JointId::l_elbow, 0.1 * t, -0.6 * t);
    put(JointId::r_wrist, -0.1 * t, -0.2 * t);
    put(JointId::l_wrist, 0.1 * t, -0.2 * t);
    put(JointId::r_hip, -0.12 * t, 0);
    put(JointId::l_hip, 0.12 * t, 0);
    put(JointId::r_knee, -0.12 * t, 0.95 * t);
    put(JointId::l_knee, 0.12 * t, 0.95 * t);
    put(JointId::r_ankle, -0.12 * t, 1.85 * t);
    put(JointId::l_ankle, 0.12 * t, 1.85 * t);
    return p;
}

// An empty but valid stream scaffold: n frames, no poses or splashes yet.
inline SymbolStream blank_stream(std::int64_t n, Facing facing = Facing::right) {
    SymbolStream s;
    s.clip_id = "fixture";
    s.fps = 30.0;
    s.frame_width = 1280.0;
    s.frame_height = 720.0;
    s.platform.edge_point = {300.0, 200.0};
    s.platform.facing = facing;
    s.platform.water_y = 650.0;
    s.frames.resize(static_cast<size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) s.frames[static_cast<size_t>(i)].frame_index = i;
    return s;
}

inline SymbolStream mirror_stream(const SymbolStream& s) {
    SymbolStream out = s;
    const double w = s.frame_width;
    out.platform.facing = s.platform.facing == Facing::left ? Facing::right : Facing::left;
    out.platform.edge_point.x = w - s.platform.edge_point.x;
    for (auto& frame : out.frames) {
        if (frame.pose) {
            Pose mirrored = *frame.pose;
            for (int i = 0; i < kJointCount; ++i)
                mirrored.joints[static_cast<size_t>(i)].pt.x =
                    w - mirrored.joints[static_cast<size_t>(i)].pt.x;
            // mirroring swaps the diver's left and right sides
            auto swap_lr = [&](JointId a, JointId b) {
                std::swap(mirrored[a], mirrored[b]);
            };
            swap_lr(JointId::r_shoulder, JointId::l_shoulder);
            swap_lr(JointId::r_elbow, JointId::l_elbow);
            swap_lr(JointId::r_wrist, JointId::l_wrist);
            swap_lr(JointId::r_hip, JointId::l_hip);
            swap_lr(JointId::r_knee, JointId::l_knee);
            swap_lr(JointId::r_ankle, JointId::l_ankle);
            frame.pose = mirrored;
        }
        if (frame.splash) {
            auto& b = frame.splash->bbox;
            b[0] = w - b[0] - b[2];
        }
    }
    return out;
}

inline SymbolStream scale_stream(const SymbolStream& s, double k) {
    SymbolStream out = s;
    out.frame_width *= k;
    out.frame_height *= k;
    out.platform.edge_point = {k * s.platform.edge_point.x, k * s.platform.edge_point.y};
    out.platform.water_y *= k;
    for (auto& frame : out.frames) {
        if (frame.pose) {
            for (auto& joint : frame.pose->joints) {
                joint.pt.x *= k;
                joint.pt.y *= k;
            }
        }
        if (frame.splash) {
            frame.splash->area *= k * k;
            for (auto& v : frame.splash->bbox) v *= k;
        }
    }
    return out;
}

// Literal transcription of the somersault-counter pseudocode, used as the
// differential oracle for the production counter. Vectors are math-frame
// pelvis-to-thorax directions; nullopt marks frames without a pose.
inline int somersault_counter_reference(
    const std::vector<std::optional<Vec2>>& torso_per_frame, std::int64_t takeoff_end,
    bool armstand, double threshold_deg = 75.0) {
    int half_som_count = 0;
    const double up_x = 0.0, up_y = 1.0;
    const double down_x = 0.0, down_y = -1.0;
    for (std::int64_t f = 0; f < static_cast<std::int64_t>(torso_per_frame.size()); ++f) {
        const auto& torso = torso_per_frame[static_cast<size_t>(f)];
        if (!torso || f < takeoff_end) continue;
        double v2x, v2y;
        if ((armstand && half_som_count % 2 == 1) ||
            (!armstand && half_som_count % 2 == 0)) {
            v2x = down_x;
            v2y = down_y;
        } else {
            v2x = up_x;
            v2y = up_y;
        }
        const double dot = torso->x * v2x + torso->y * v2y;
        const double n1 = std::sqrt(torso->x * torso->x + torso->y * torso->y);
        const double n2 = std::sqrt(v2x * v2x + v2y * v2y);
        double c = dot / (n1 * n2);
        c = std::max(-1.0, std::min(1.0, c));
        const double angle = std::acos(c) * 180.0 / 3.14159265358979323846;
        if (angle <= threshold_deg) ++half_som_count;
    }
    return half_som_count;
}

// Wraps math-frame torso vectors into a minimal stream the production
// counter accepts (frame f holds a pose whose thorax - pelvis equals the
// given vector, image coordinates).
inline SymbolStream stream_from_torso_vectors(
    const std::vector<std::optional<Vec2>>& torso_per_frame) {
    SymbolStream s = blank_stream(static_cast<std::int64_t>(torso_per_frame.size()));
    const Vec2 base{400.0, 350.0};
    for (size_t i = 0; i < torso_per_frame.size(); ++i) {
        if (!torso_per_frame[i]) continue;
        Pose p = standing_pose(base, 50.0);
        p[JointId::thorax] =
            Joint{{base.x + torso_per_frame[i]->x, base.y - torso_per_frame[i]->y}, 1.0};
        s.frames[i].pose = p;
    }
    return s;
}

} // namespace nsaqa::testing

#endif
