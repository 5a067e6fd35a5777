#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "errors.hpp"

namespace nsaqa::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

// skeleton proportions, torso-lengths
constexpr double kNeckLen = 0.22;
constexpr double kHeadLen = 0.45;
constexpr double kShoulderSpan = 0.42;
constexpr double kHipSpan = 0.50;
constexpr double kThighLen = 0.95;
constexpr double kShankLen = 0.92;
constexpr double kUpperArmLen = 0.42;
constexpr double kForearmLen = 0.40;
constexpr double kLateralFloor = 0.04; // out-of-plane floor on hip/shoulder projections
constexpr double kHeadLeanDeg = 24.0;  // stance head lean encoding the facing
constexpr double kJointConfidence = 0.9;

Vec2 rot(Vec2 v, double deg) {
    const double c = std::cos(deg * kDegToRad);
    const double s = std::sin(deg * kDegToRad);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double vnorm(Vec2 v) { return std::hypot(v.x, v.y); }

Vec2 to_image(Vec2 math_vec) { return {math_vec.x, -math_vec.y}; }

// Per-frame articulation, all in the math frame relative to the pelvis.
struct FramePose {
    double theta_som = 0.0;  // accumulated somersault angle
    double theta_tw = 0.0;   // accumulated twist angle
    double hip_deg = 176.0;  // shoulder-hip-knee target
    double knee_deg = 176.0; // hip-knee-ankle target
    double feet_deg = 0.0;   // spread between the two leg chains
    double head_extra_deg = 0.0;
    double leg_extra_deg = 0.0;
    Vec2 pelvis_image;
};

struct BodyFrame {
    std::array<Vec2, kJointCount> offsets_math; // relative to pelvis
};

BodyFrame build_body(const DiveScript& sc, const FramePose& fp) {
    const Vec2 axis0 = sc.descriptor.armstand ? Vec2{0.0, -1.0} : Vec2{0.0, 1.0};
    const double facing_x =
        (sc.descriptor.rotation_type == RotationType::forward ||
         sc.descriptor.rotation_type == RotationType::reverse)
            ? sc.platform.pool_sign()
            : -sc.platform.pool_sign();
    const Vec2 front0{facing_x, 0.0};
    // fold legs toward the diver's front
    const double fold_sign = (axis0.x * front0.y - axis0.y * front0.x) > 0.0 ? 1.0 : -1.0;

    const Vec2 axis = rot(axis0, fp.theta_som);
    const Vec2 perp = rot(axis, 90.0); // in-plane left-right projection direction
    const double t = sc.torso_px;

    BodyFrame out{};
    auto set = [&](JointId id, Vec2 v) { out.offsets_math[static_cast<int>(id)] = v; };

    set(JointId::pelvis, {0.0, 0.0});
    const Vec2 thorax = t * axis;
    set(JointId::thorax, thorax);

    const Vec2 head_dir = rot(axis, fp.head_extra_deg);
    const Vec2 upper_neck = thorax + (kNeckLen * t) * head_dir;
    set(JointId::upper_neck, upper_neck);
    set(JointId::head_top, upper_neck + (kHeadLen * t) * head_dir);

    const double tw_proj = std::sin(fp.theta_tw * kDegToRad);
    const Vec2 hip_vec =
        (kHipSpan * t * tw_proj) * perp + (kHipSpan * t * kLateralFloor) * axis;
    const Vec2 sh_vec =
        (kShoulderSpan * t * tw_proj) * perp + (kShoulderSpan * t * kLateralFloor) * axis;

    const Vec2 l_hip = 0.5 * hip_vec;
    const Vec2 r_hip = -0.5 * hip_vec;
    set(JointId::l_hip, l_hip);
    set(JointId::r_hip, r_hip);
    const Vec2 l_shoulder = thorax + 0.5 * sh_vec;
    const Vec2 r_shoulder = thorax + (-0.5) * sh_vec;
    set(JointId::l_shoulder, l_shoulder);
    set(JointId::r_shoulder, r_shoulder);

    // arms extended past the head
    set(JointId::l_elbow, l_shoulder + (kUpperArmLen * t) * axis);
    set(JointId::r_elbow, r_shoulder + (kUpperArmLen * t) * axis);
    set(JointId::l_wrist, l_shoulder + ((kUpperArmLen + kForearmLen) * t) * axis);
    set(JointId::r_wrist, r_shoulder + ((kUpperArmLen + kForearmLen) * t) * axis);

    // sagittal leg chain: thigh at the hip-angle from the torso ray, shank
    // folded back by the knee bend
    const Vec2 thigh = (kThighLen * t) * rot(axis, fold_sign * fp.hip_deg);
    const Vec2 shank_dir = rot(thigh, -fold_sign * (180.0 - fp.knee_deg));
    const Vec2 shank = (kShankLen / kThighLen) * shank_dir;

    auto leg = [&](Vec2 hip, double spread_deg, JointId knee_id, JointId ankle_id) {
        const double a = spread_deg + fp.leg_extra_deg;
        const Vec2 knee = hip + rot(thigh, a);
        set(knee_id, knee);
        set(ankle_id, knee + rot(shank, a));
    };
    leg(l_hip, 0.5 * fp.feet_deg, JointId::l_knee, JointId::l_ankle);
    leg(r_hip, -0.5 * fp.feet_deg, JointId::r_knee, JointId::r_ankle);
    return out;
}

Pose body_to_pose(const BodyFrame& body, Vec2 pelvis_image) {
    Pose pose;
    for (int i = 0; i < kJointCount; ++i) {
        pose.joints[static_cast<size_t>(i)].pt =
            pelvis_image + to_image(body.offsets_math[static_cast<size_t>(i)]);
        pose.joints[static_cast<size_t>(i)].confidence = kJointConfidence;
    }
    return pose;
}

double somersault_sign(const DiveDescriptor& d, const PlatformGeometry& platform) {
    const bool toward_pool = d.rotation_type == RotationType::forward ||
                             d.rotation_type == RotationType::inward;
    const double pool_x = platform.pool_sign();
    // CCW motion carries the tip of an upright torso toward -x, of an
    // inverted torso toward +x
    double sign = d.armstand ? pool_x : -pool_x;
    return toward_pool ? sign : -sign;
}

std::vector<double> rate_profile(std::int64_t n, std::int64_t start, std::int64_t end,
                                 std::int64_t ramp, double total_deg) {
    std::vector<double> rates(static_cast<size_t>(n), 0.0);
    const std::int64_t len = end - start;
    if (len <= 0 || total_deg == 0.0) return rates;
    ramp = std::min(ramp, len / 3);
    double weight_sum = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
        double w = 1.0;
        if (ramp > 0) {
            w = std::min({static_cast<double>(i + 1) / static_cast<double>(ramp + 1), 1.0,
                          static_cast<double>(len - i) / static_cast<double>(ramp + 1)});
        }
        rates[static_cast<size_t>(start + i)] = w;
        weight_sum += w;
    }
    const double scale = total_deg / weight_sum;
    for (std::int64_t i = 0; i < len; ++i)
        rates[static_cast<size_t>(start + i)] *= scale;
    return rates;
}

double solve_entry_rotation(const DiveScript& sc, double theta_final, double target_tilt_deg) {
    auto tilt_of = [&](double phi) {
        FramePose fp;
        fp.theta_som = theta_final;
        fp.hip_deg = 178.0;
        fp.knee_deg = 178.0 - sc.entry_knee_bend_deg;
        fp.feet_deg = sc.feet_apart_deg;
        fp.head_extra_deg = -phi;
        fp.leg_extra_deg = phi;
        const BodyFrame body = build_body(sc, fp);
        const Vec2 head = body.offsets_math[static_cast<int>(JointId::head_top)];
        const Vec2 la = body.offsets_math[static_cast<int>(JointId::l_ankle)];
        const Vec2 ra = body.offsets_math[static_cast<int>(JointId::r_ankle)];
        const Vec2 mid = 0.5 * (la + ra);
        const Vec2 line = mid - head;
        const double ang = std::atan2(std::fabs(line.x), std::fabs(line.y)) / kDegToRad;
        return ang;
    };
    if (target_tilt_deg <= 0.0) return 0.0;
    double lo = 0.0, hi = 80.0;
    if (tilt_of(hi) < target_tilt_deg)
        raise(ErrorKind::InfeasibleScript,
              "entry tilt of " + std::to_string(target_tilt_deg) + " degrees not reachable");
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tilt_of(mid) < target_tilt_deg) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

DiveScript build_script(const ScriptParams& p) {
    const DiveDescriptor& d = p.descriptor;
    if (d.half_somersaults < 1)
        raise(ErrorKind::InfeasibleScript, "a dive needs at least one half-somersault");
    if (d.half_twists < 0 || d.half_somersaults > 12 || d.half_twists > 10)
        raise(ErrorKind::InfeasibleScript, "rotation counts out of supported range");
    if (d.half_twists >= 3 &&
        (d.position == BodyPosition::tuck || d.position == BodyPosition::pike))
        raise(ErrorKind::InfeasibleScript,
              "tuck/pike position cannot be held through 3 or more half-twists");

    DiveScript sc;
    sc.clip_id = p.clip_id;
    sc.descriptor = d;
    sc.fps = p.fps;
    sc.frame_width = p.frame_width;
    sc.frame_height = p.frame_height;
    sc.torso_px = p.torso_px;
    sc.noise_sigma = p.noise_sigma;
    sc.pose_dropout = p.pose_dropout;
    sc.feet_apart_deg = p.feet_apart_deg;
    sc.entry_tilt_deg = p.entry_tilt_deg;
    sc.entry_knee_bend_deg = p.entry_knee_bend_deg;

    sc.platform.facing = p.facing;
    sc.platform.edge_point = {p.facing == Facing::right ? 0.24 * p.frame_width
                                                        : 0.76 * p.frame_width,
                              0.26 * p.frame_height};
    sc.platform.water_y = 0.90 * p.frame_height;

    sc.jump_frame = p.stance_frames;
    sc.pool_speed_torso = p.pool_speed_torso;

    // Rotation may only begin once the stance pose has already cleared the
    // takeoff-distance threshold: the leg sweep of platform-facing dives
    // would otherwise hold the nearest ankle below it for much of the
    // flight, pushing the detectable crossing past the rotation onset.
    std::int64_t crossing_delay;
    {
        FramePose glide; // the pre-rotation flight pose, feet spread included
        glide.hip_deg = 176.0;
        glide.knee_deg = 176.0;
        glide.feet_deg = p.feet_apart_deg;
        const BodyFrame body = build_body(sc, glide);
        const double s = sc.platform.pool_sign();
        const double ankle_off =
            std::min(s * body.offsets_math[static_cast<int>(JointId::l_ankle)].x,
                     s * body.offsets_math[static_cast<int>(JointId::r_ankle)].x) /
            p.torso_px;
        const double glide_dist = -0.06 + ankle_off; // pelvis sits 0.06 inside the edge
        crossing_delay = static_cast<std::int64_t>(
                             std::floor((0.5 - glide_dist) / p.pool_speed_torso)) +
                         1;
        sc.rotation_start_frame = sc.jump_frame + crossing_delay + 4;
    }

    const std::int64_t twist_frames =
        d.half_twists > 0
            ? static_cast<std::int64_t>(std::ceil(d.half_twists * 180.0 / 11.5)) + 4
            : 0;
    std::int64_t rotation_frames = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(d.half_somersaults * 180.0 / 22.0)) + 6, 30);
    if (d.half_twists > 0) {
        const bool folded =
            d.position == BodyPosition::tuck || d.position == BodyPosition::pike;
        // folded positions need a clear post-twist window for classification
        const std::int64_t need = folded ? (13 * twist_frames) / 5 : twist_frames + 10;
        rotation_frames = std::max(rotation_frames, need);
    }
    std::int64_t flight = crossing_delay + 2 + rotation_frames + 6;
    if (p.flight_frames > 0) flight = std::max(flight, p.flight_frames);
    sc.water_contact_frame = sc.jump_frame + flight;
    sc.rotation_end_frame = sc.water_contact_frame - 6;
    rotation_frames = sc.rotation_end_frame - sc.rotation_start_frame;

    sc.twist_start_frame = sc.rotation_start_frame + 2;
    sc.twist_end_frame = sc.twist_start_frame + twist_frames;

    sc.apex_frame = sc.jump_frame + std::max<std::int64_t>(3, (flight * 33) / 100);
    const double stance_height = 1.9; // pelvis above the edge while standing, roughly
    sc.apex_height_torso = (sc.descriptor.armstand ? 1.85 : stance_height) + p.apex_extra_torso;

    const std::int64_t splash_frames = p.splash_peak_fraction > 0.0 ? 10 : 4;
    sc.frame_count = sc.water_contact_frame + splash_frames;

    if (p.splash_peak_fraction > 0.0) {
        const double peak = p.splash_peak_fraction * p.frame_width * p.frame_height;
        for (std::int64_t i = 0; i < splash_frames; ++i) {
            double level;
            if (i == 0) level = 0.35;
            else if (i == 1) level = 0.8;
            else if (i == 2) level = 1.0;
            else level = std::max(0.15, 1.0 - 0.11 * static_cast<double>(i - 2));
            sc.splash_schedule.emplace_back(sc.water_contact_frame + i, level * peak);
        }
    }

    const double sign = somersault_sign(d, sc.platform);
    sc.som_rate_deg = rate_profile(sc.frame_count, sc.rotation_start_frame,
                                   sc.rotation_end_frame, 3,
                                   sign * d.half_somersaults * 180.0);
    sc.twist_rate_deg = rate_profile(sc.frame_count, sc.twist_start_frame,
                                     sc.twist_end_frame, 2, d.half_twists * 180.0);

    switch (d.position) {
        case BodyPosition::tuck:
            sc.position_hip_deg = 55.0;
            sc.position_knee_deg = 62.0;
            break;
        case BodyPosition::pike:
            sc.position_hip_deg = 72.0;
            sc.position_knee_deg = 176.0;
            break;
        case BodyPosition::straight:
            sc.position_hip_deg = 174.0;
            sc.position_knee_deg = 176.0;
            break;
        case BodyPosition::free_position:
            sc.position_hip_deg = 135.0;
            sc.position_knee_deg = 140.0;
            break;
    }
    return sc;
}

std::pair<SymbolStream, GroundTruth> generate(const DiveScript& sc, std::uint64_t seed) {
    // script consistency
    if (sc.descriptor.half_somersaults < 1)
        raise(ErrorKind::InfeasibleScript, "descriptor requires at least one half-somersault");
    if (!(sc.jump_frame < sc.water_contact_frame &&
          sc.water_contact_frame < sc.frame_count))
        raise(ErrorKind::InfeasibleScript, "jump, water contact and frame count out of order");
    if (sc.som_rate_deg.size() != static_cast<size_t>(sc.frame_count) ||
        sc.twist_rate_deg.size() != static_cast<size_t>(sc.frame_count))
        raise(ErrorKind::InfeasibleScript, "rate profiles must cover every frame");
    double som_total = 0.0, twist_total = 0.0;
    for (double r : sc.som_rate_deg) som_total += r;
    for (double r : sc.twist_rate_deg) twist_total += r;
    if (std::fabs(std::fabs(som_total) - sc.descriptor.half_somersaults * 180.0) > 1e-6)
        raise(ErrorKind::InfeasibleScript,
              "somersault rates integrate to " + std::to_string(som_total) +
                  " degrees, inconsistent with the descriptor");
    if (std::fabs(twist_total - sc.descriptor.half_twists * 180.0) > 1e-6)
        raise(ErrorKind::InfeasibleScript,
              "twist rates integrate to " + std::to_string(twist_total) +
                  " degrees, inconsistent with the descriptor");

    const std::int64_t n = sc.frame_count;
    const std::int64_t j = sc.jump_frame;
    const std::int64_t w = sc.water_contact_frame;
    const double t = sc.torso_px;
    const double dir = sc.platform.pool_sign();
    const double facing_x =
        (sc.descriptor.rotation_type == RotationType::forward ||
         sc.descriptor.rotation_type == RotationType::reverse)
            ? dir
            : -dir;

    // cumulative rotation angles; theta[f] is the orientation at frame f
    std::vector<double> theta_som(static_cast<size_t>(n), 0.0);
    std::vector<double> theta_tw(static_cast<size_t>(n), 0.0);
    for (std::int64_t f = 1; f < n; ++f) {
        theta_som[static_cast<size_t>(f)] =
            theta_som[static_cast<size_t>(f - 1)] + sc.som_rate_deg[static_cast<size_t>(f - 1)];
        theta_tw[static_cast<size_t>(f)] =
            theta_tw[static_cast<size_t>(f - 1)] + sc.twist_rate_deg[static_cast<size_t>(f - 1)];
    }
    const double theta_final = theta_som[static_cast<size_t>(n - 1)];

    // stance pelvis: legs (or arms, for armstand takeoffs) reach the platform
    FramePose stance;
    stance.hip_deg = 176.0;
    stance.knee_deg = 174.0;
    stance.feet_deg = 2.0;
    stance.head_extra_deg = -facing_x * kHeadLeanDeg;
    const BodyFrame stance_body = build_body(sc, stance);
    double support_drop; // math-frame y of the lowest support point, relative to pelvis
    if (sc.descriptor.armstand) {
        support_drop = std::min(
            stance_body.offsets_math[static_cast<int>(JointId::l_wrist)].y,
            stance_body.offsets_math[static_cast<int>(JointId::r_wrist)].y);
    } else {
        support_drop = std::min(
            stance_body.offsets_math[static_cast<int>(JointId::l_ankle)].y,
            stance_body.offsets_math[static_cast<int>(JointId::r_ankle)].y);
    }
    const double pelvis_stance_y = sc.platform.edge_point.y + support_drop - 0.03 * t;
    const double pelvis_stance_x = sc.platform.edge_point.x - dir * 0.06 * t;

    const std::int64_t fa = sc.apex_frame;
    const double y_apex = sc.platform.edge_point.y - sc.apex_height_torso * t;
    const double y_water = sc.platform.water_y + 0.1 * t;
    const double ga =
        2.0 * (pelvis_stance_y - y_apex) / static_cast<double>((j - fa) * (j - fa));
    const double gb = 2.0 * (y_water - y_apex) / static_cast<double>((w - fa) * (w - fa));

    auto pelvis_at = [&](std::int64_t f) -> Vec2 {
        if (f < j) return {pelvis_stance_x, pelvis_stance_y};
        const double x = pelvis_stance_x + dir * sc.pool_speed_torso * t *
                                               static_cast<double>(f - j);
        const double g = f <= fa ? ga : gb;
        const double y = y_apex + 0.5 * g * static_cast<double>((f - fa) * (f - fa));
        return {x, y};
    };

    const double entry_phi = solve_entry_rotation(sc, theta_final, sc.entry_tilt_deg);

    auto frame_pose_params = [&](std::int64_t f) -> FramePose {
        FramePose fp;
        fp.theta_som = theta_som[static_cast<size_t>(f)];
        fp.theta_tw = theta_tw[static_cast<size_t>(f)];
        fp.pelvis_image = pelvis_at(f);
        if (f < sc.rotation_start_frame) {
            // stance, then the straight glide the crossing estimate assumes
            fp.hip_deg = 176.0;
            fp.knee_deg = f < j ? 174.0 : 176.0;
            fp.feet_deg = f < j ? 2.0 : sc.feet_apart_deg;
            fp.head_extra_deg = -facing_x * kHeadLeanDeg;
        } else if (f < sc.rotation_end_frame) {
            fp.feet_deg = sc.feet_apart_deg;
            const bool in_twist = sc.descriptor.half_twists > 0 &&
                                  f >= sc.twist_start_frame && f < sc.twist_end_frame;
            const std::int64_t pos_start = sc.descriptor.half_twists > 0
                                               ? sc.twist_end_frame
                                               : sc.rotation_start_frame + 2;
            if (in_twist) {
                const bool soft =
                    sc.descriptor.position == BodyPosition::free_position;
                fp.hip_deg = soft ? 150.0 : 174.0;
                fp.knee_deg = 176.0;
            } else if (f >= pos_start) {
                fp.hip_deg = sc.position_hip_deg;
                fp.knee_deg = sc.position_knee_deg;
            } else {
                fp.hip_deg = 174.0;
                fp.knee_deg = 176.0;
            }
        } else {
            // line-up through water contact
            fp.hip_deg = 178.0;
            fp.knee_deg = 178.0 - sc.entry_knee_bend_deg;
            fp.feet_deg = sc.feet_apart_deg;
            fp.head_extra_deg = -entry_phi;
            fp.leg_extra_deg = entry_phi;
        }
        return fp;
    };

    std::vector<Pose> clean(static_cast<size_t>(n));
    std::vector<bool> has_pose(static_cast<size_t>(n), false);
    for (std::int64_t f = 0; f < n; ++f) {
        // the pose estimator holds on through first water contact, then
        // loses the diver underwater
        if (f > w) continue;
        const FramePose fp = frame_pose_params(f);
        clean[static_cast<size_t>(f)] = body_to_pose(build_body(sc, fp), fp.pelvis_image);
        has_pose[static_cast<size_t>(f)] = true;
    }

    // ---- ground truth, from the clean joints ----
    GroundTruth gt;
    gt.clip_id = sc.clip_id;
    gt.descriptor = sc.descriptor;
    gt.torso_px = t;
    gt.jump_frame = j;
    gt.water_contact_frame = w;

    auto pool_dist = [&](Vec2 pt) { return dir * (pt.x - sc.platform.edge_point.x) / t; };

    std::int64_t crossing = -1;
    for (std::int64_t f = j; f < w; ++f) {
        const Pose& p = clean[static_cast<size_t>(f)];
        const double d_ankle = std::min(pool_dist(p[JointId::r_ankle].pt),
                                        pool_dist(p[JointId::l_ankle].pt));
        if (d_ankle > 0.5) {
            crossing = f;
            break;
        }
    }
    if (crossing < 0)
        raise(ErrorKind::InfeasibleScript, "script never clears the takeoff threshold");

    std::int64_t entry_start = -1;
    for (std::int64_t f = 0; f < w; ++f) {
        if (pelvis_at(f).y >= sc.platform.water_y - t) {
            entry_start = f;
            break;
        }
    }
    if (!sc.splash_schedule.empty())
        entry_start = entry_start < 0
                          ? sc.splash_schedule.front().first
                          : std::min(entry_start, sc.splash_schedule.front().first);
    if (entry_start < 0)
        raise(ErrorKind::InfeasibleScript, "script never reaches the water");
    const std::int64_t entry_end =
        sc.splash_schedule.empty() ? n - 1 : sc.splash_schedule.back().first;

    gt.phases.takeoff = {0, crossing - 1};
    gt.phases.somersault = FrameRange{sc.rotation_start_frame, sc.rotation_end_frame - 1};
    if (sc.descriptor.half_twists > 0)
        gt.phases.twist = FrameRange{sc.twist_start_frame, sc.twist_end_frame - 1};
    gt.phases.entry = {entry_start, entry_end};

    // aspect ground truth over [crossing, entry_start) flight frames
    auto angle_deg = [](Vec2 a, Vec2 b) {
        const double na = vnorm(a), nb = vnorm(b);
        const double c = std::clamp((a.x * b.x + a.y * b.y) / (na * nb), -1.0, 1.0);
        return std::acos(c) / kDegToRad;
    };
    auto hip_angle_of = [&](const Pose& p, JointId sh, JointId hip, JointId knee) {
        return angle_deg(p[sh].pt - p[hip].pt, p[knee].pt - p[hip].pt);
    };
    auto knee_angle_of = [&](const Pose& p, JointId hip, JointId knee, JointId ankle) {
        return angle_deg(p[hip].pt - p[knee].pt, p[ankle].pt - p[knee].pt);
    };
    auto mean_hip = [&](const Pose& p) {
        return 0.5 * (hip_angle_of(p, JointId::l_shoulder, JointId::l_hip, JointId::l_knee) +
                      hip_angle_of(p, JointId::r_shoulder, JointId::r_hip, JointId::r_knee));
    };
    auto mean_knee = [&](const Pose& p) {
        return 0.5 * (knee_angle_of(p, JointId::l_hip, JointId::l_knee, JointId::l_ankle) +
                      knee_angle_of(p, JointId::r_hip, JointId::r_knee, JointId::r_ankle));
    };

    {
        double feet_sum = 0.0, knee_dev_sum = 0.0, min_dist = 1e18, peak = -1e18;
        std::int64_t flight_count = 0;
        for (std::int64_t f = crossing; f < entry_start; ++f) {
            if (!has_pose[static_cast<size_t>(f)]) continue;
            const Pose& p = clean[static_cast<size_t>(f)];
            feet_sum += angle_deg(p[JointId::l_ankle].pt - p[JointId::pelvis].pt,
                                  p[JointId::r_ankle].pt - p[JointId::pelvis].pt);
            knee_dev_sum += 180.0 - mean_knee(p);
            for (const auto& joint : p.joints) min_dist = std::min(min_dist, pool_dist(joint.pt));
            ++flight_count;
        }
        for (std::int64_t f = crossing; f < w; ++f)
            peak = std::max(peak,
                            (sc.platform.edge_point.y - pelvis_at(f).y) / t);
        if (flight_count > 0) {
            gt.aspects[static_cast<int>(AspectId::feet_apart)] =
                feet_sum / static_cast<double>(flight_count);
            if (sc.descriptor.position != BodyPosition::tuck)
                gt.aspects[static_cast<int>(AspectId::knee_straightness)] =
                    knee_dev_sum / static_cast<double>(flight_count);
            gt.aspects[static_cast<int>(AspectId::distance_from_platform)] = min_dist;
            gt.distance_category = min_dist < 0.3   ? DistanceCategory::too_close
                                   : min_dist > 2.0 ? DistanceCategory::too_far
                                                    : DistanceCategory::good;
            gt.aspects[static_cast<int>(AspectId::height_off_platform)] = peak;
        }
    }
    if (sc.descriptor.position != BodyPosition::straight) {
        double acc = 0.0;
        std::int64_t cnt = 0;
        for (std::int64_t f = sc.rotation_start_frame; f < sc.rotation_end_frame; ++f) {
            if (!has_pose[static_cast<size_t>(f)]) continue;
            const Pose& p = clean[static_cast<size_t>(f)];
            double v = mean_hip(p);
            if (sc.descriptor.position == BodyPosition::tuck)
                v = 0.5 * (v + mean_knee(p));
            acc += v;
            ++cnt;
        }
        if (cnt > 0)
            gt.aspects[static_cast<int>(AspectId::somersault_tightness)] =
                acc / static_cast<double>(cnt);
    }
    if (sc.descriptor.half_twists > 0) {
        double acc = 0.0;
        std::int64_t cnt = 0;
        for (std::int64_t f = sc.twist_start_frame; f < sc.twist_end_frame; ++f) {
            if (!has_pose[static_cast<size_t>(f)]) continue;
            const Pose& p = clean[static_cast<size_t>(f)];
            acc += (180.0 - mean_hip(p)) + (180.0 - mean_knee(p));
            ++cnt;
        }
        if (cnt > 0)
            gt.aspects[static_cast<int>(AspectId::twist_tightness)] =
                acc / static_cast<double>(cnt);
    }
    {
        // verticalness at the last airborne pose
        const Pose& p = clean[static_cast<size_t>(w - 1)];
        const Vec2 head = p[JointId::head_top].pt;
        const Vec2 mid = 0.5 * (p[JointId::l_ankle].pt + p[JointId::r_ankle].pt);
        const Vec2 line = mid - head;
        gt.aspects[static_cast<int>(AspectId::verticalness)] =
            std::atan2(std::fabs(line.x), std::fabs(line.y)) / kDegToRad;
    }
    {
        double acc = 0.0;
        std::int64_t cnt = 0;
        for (std::int64_t f = std::max<std::int64_t>(0, entry_start - 2);
             f <= std::min(entry_start + 2, n - 1); ++f) {
            if (!has_pose[static_cast<size_t>(f)]) continue;
            const Pose& p = clean[static_cast<size_t>(f)];
            acc += (180.0 - mean_hip(p)) + (180.0 - mean_knee(p));
            ++cnt;
        }
        if (cnt > 0)
            gt.aspects[static_cast<int>(AspectId::entry_straightness)] =
                acc / static_cast<double>(cnt);
    }
    {
        double peak_area = 0.0;
        for (const auto& [f, area] : sc.splash_schedule) peak_area = std::max(peak_area, area);
        gt.aspects[static_cast<int>(AspectId::splash_size)] =
            peak_area / (sc.frame_width * sc.frame_height);
    }

    // ---- emit the stream (noise and dropout applied here only) ----
    SymbolStream stream;
    stream.clip_id = sc.clip_id;
    stream.fps = sc.fps;
    stream.frame_width = sc.frame_width;
    stream.frame_height = sc.frame_height;
    stream.platform = sc.platform;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (std::int64_t f = 0; f < n; ++f) {
        FrameSymbols frame;
        frame.frame_index = f;
        if (has_pose[static_cast<size_t>(f)]) {
            const bool dropped = sc.pose_dropout > 0.0 && unif(rng) < sc.pose_dropout;
            if (!dropped) {
                Pose p = clean[static_cast<size_t>(f)];
                if (sc.noise_sigma > 0.0) {
                    for (auto& joint : p.joints) {
                        joint.pt.x += sc.noise_sigma * gauss(rng);
                        joint.pt.y += sc.noise_sigma * gauss(rng);
                    }
                }
                frame.pose = p;
            }
        }
        for (const auto& [sf, area] : sc.splash_schedule) {
            if (sf != f) continue;
            SplashObservation splash;
            splash.area = area;
            const double bw = std::min(std::sqrt(area * 3.0), 0.9 * sc.frame_width);
            const double bh = std::min(std::sqrt(area / 3.0), 0.08 * sc.frame_height);
            double bx = pelvis_at(w).x - 0.5 * bw;
            bx = std::clamp(bx, 0.0, sc.frame_width - bw);
            double by = sc.platform.water_y - 0.5 * bh;
            by = std::clamp(by, 0.0, sc.frame_height - bh);
            splash.bbox = {bx, by, bw, bh};
            frame.splash = splash;
        }
        stream.frames.push_back(std::move(frame));
    }
    return {std::move(stream), std::move(gt)};
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::pair<SymbolStream, GroundTruth> sample_one(std::uint64_t seed, std::int64_t index,
                                                double noise_sigma, double pose_dropout) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
    auto pick_int = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    auto pick_real = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    ScriptParams p;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "synth-%llu-%05lld",
                  static_cast<unsigned long long>(seed), static_cast<long long>(index));
    p.clip_id = buf;

    p.descriptor.armstand = pick_real(0.0, 1.0) < 0.25;
    p.descriptor.rotation_type = static_cast<RotationType>(pick_int(0, 3));
    p.descriptor.half_somersaults = pick_int(1, 9);
    p.descriptor.half_twists = pick_int(0, 8);
    if (p.descriptor.half_twists >= 3) {
        p.descriptor.position =
            pick_int(0, 1) == 0 ? BodyPosition::straight : BodyPosition::free_position;
    } else {
        p.descriptor.position = static_cast<BodyPosition>(pick_int(0, 3));
    }

    const double sizes[2][2] = {{1280.0, 720.0}, {1920.0, 1080.0}};
    const int size_idx = pick_int(0, 1);
    p.frame_width = sizes[size_idx][0];
    p.frame_height = sizes[size_idx][1];
    p.fps = std::array<double, 4>{30.0, 40.0, 50.0, 60.0}[static_cast<size_t>(pick_int(0, 3))];
    p.facing = pick_int(0, 1) == 0 ? Facing::left : Facing::right;
    p.torso_px = pick_real(42.0, 72.0) * (size_idx == 1 ? 1.4 : 1.0);
    p.stance_frames = pick_int(22, 34);
    p.pool_speed_torso = pick_real(0.04, 0.07);
    p.apex_extra_torso = p.descriptor.armstand ? pick_real(0.2, 0.5) : pick_real(0.5, 1.1);
    p.feet_apart_deg = pick_real(0.0, 13.0);
    p.entry_tilt_deg = pick_real(0.0, 1.0) < 0.6 ? pick_real(0.5, 4.0) : pick_real(4.0, 22.0);
    p.entry_knee_bend_deg = pick_real(0.0, 7.0);
    p.splash_peak_fraction = pick_real(0.0, 1.0) < 0.12 ? 0.0 : pick_real(0.0012, 0.02);
    p.noise_sigma = noise_sigma;
    p.pose_dropout = pose_dropout;

    const DiveScript sc = build_script(p);
    return generate(sc, mix_seed(seed ^ 0xD6E8FEB86659FD93ULL, static_cast<std::uint64_t>(index)));
}

std::vector<std::pair<SymbolStream, GroundTruth>> sample_corpus(std::int64_t n,
                                                                std::uint64_t seed,
                                                                double noise_sigma,
                                                                double pose_dropout) {
    if (n < 1) raise(ErrorKind::InfeasibleScript, "corpus size must be at least 1");
    std::vector<std::pair<SymbolStream, GroundTruth>> out;
    out.reserve(static_cast<size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        out.push_back(sample_one(seed, i, noise_sigma, pose_dropout));
    return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

ordered_json range_json(const FrameRange& r) { return ordered_json::array({r.start, r.end}); }

FrameRange range_from(const json& j) {
    return {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()};
}

} // namespace

std::string ground_truth_to_json(const GroundTruth& gt) {
    ordered_json j = ordered_json::object();
    j["clip_id"] = gt.clip_id;
    ordered_json jd = ordered_json::object();
    jd["armstand"] = gt.descriptor.armstand;
    jd["rotation_type"] = rotation_type_name(gt.descriptor.rotation_type);
    jd["half_somersaults"] = gt.descriptor.half_somersaults;
    jd["half_twists"] = gt.descriptor.half_twists;
    jd["position"] = body_position_name(gt.descriptor.position);
    j["descriptor"] = std::move(jd);
    ordered_json jp = ordered_json::object();
    jp["takeoff"] = range_json(gt.phases.takeoff);
    jp["twist"] = gt.phases.twist ? range_json(*gt.phases.twist) : ordered_json(nullptr);
    jp["somersault"] =
        gt.phases.somersault ? range_json(*gt.phases.somersault) : ordered_json(nullptr);
    jp["entry"] = range_json(gt.phases.entry);
    j["phases"] = std::move(jp);
    ordered_json ja = ordered_json::object();
    for (int i = 0; i < kAspectCount; ++i) {
        const auto& v = gt.aspects[static_cast<size_t>(i)];
        ja[aspect_name(static_cast<AspectId>(i))] =
            v ? ordered_json(*v) : ordered_json(nullptr);
    }
    j["aspects"] = std::move(ja);
    j["distance_category"] = gt.distance_category
                                 ? ordered_json(distance_category_name(*gt.distance_category))
                                 : ordered_json(nullptr);
    j["torso_px"] = gt.torso_px;
    j["jump_frame"] = gt.jump_frame;
    j["water_contact_frame"] = gt.water_contact_frame;
    return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(ErrorKind::MalformedDocument, "ground truth: invalid JSON");
    GroundTruth gt;
    try {
        gt.clip_id = j.at("clip_id").get<std::string>();
        const json& jd = j.at("descriptor");
        gt.descriptor.armstand = jd.at("armstand").get<bool>();
        auto rt = rotation_type_from_name(jd.at("rotation_type").get<std::string>());
        auto bp = body_position_from_name(jd.at("position").get<std::string>());
        if (!rt || !bp)
            raise(ErrorKind::SchemaViolation, "ground truth: bad rotation type or position");
        gt.descriptor.rotation_type = *rt;
        gt.descriptor.position = *bp;
        gt.descriptor.half_somersaults = jd.at("half_somersaults").get<int>();
        gt.descriptor.half_twists = jd.at("half_twists").get<int>();
        const json& jp = j.at("phases");
        gt.phases.takeoff = range_from(jp.at("takeoff"));
        if (!jp.at("twist").is_null()) gt.phases.twist = range_from(jp.at("twist"));
        if (!jp.at("somersault").is_null())
            gt.phases.somersault = range_from(jp.at("somersault"));
        gt.phases.entry = range_from(jp.at("entry"));
        const json& ja = j.at("aspects");
        for (int i = 0; i < kAspectCount; ++i) {
            const json& v = ja.at(aspect_name(static_cast<AspectId>(i)));
            if (!v.is_null()) gt.aspects[static_cast<size_t>(i)] = v.get<double>();
        }
        if (j.contains("distance_category") && !j.at("distance_category").is_null()) {
            const std::string c = j.at("distance_category").get<std::string>();
            if (c == "too_close") gt.distance_category = DistanceCategory::too_close;
            else if (c == "good") gt.distance_category = DistanceCategory::good;
            else if (c == "too_far") gt.distance_category = DistanceCategory::too_far;
        }
        gt.torso_px = j.at("torso_px").get<double>();
        gt.jump_frame = j.at("jump_frame").get<std::int64_t>();
        gt.water_contact_frame = j.at("water_contact_frame").get<std::int64_t>();
    } catch (const json::exception& e) {
        raise(ErrorKind::SchemaViolation, std::string("ground truth: ") + e.what());
    }
    return gt;
}

} // namespace nsaqa::synth
