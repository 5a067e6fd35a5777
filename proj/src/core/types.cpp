#include "types.hpp"

#include <charconv>
#include <cmath>

#include "errors.hpp"

namespace nsaqa {

namespace {

constexpr const char* kJointNames[kJointCount] = {
    "head_top", "upper_neck", "thorax",  "pelvis",  "r_shoulder", "l_shoulder",
    "r_elbow",  "l_elbow",    "r_wrist", "l_wrist", "r_hip",      "l_hip",
    "r_knee",   "l_knee",     "r_ankle", "l_ankle",
};

constexpr const char* kAspectNames[kAspectCount] = {
    "feet_apart",       "height_off_platform", "distance_from_platform",
    "somersault_tightness", "knee_straightness", "twist_tightness",
    "verticalness",     "entry_straightness",  "splash_size",
};

constexpr const char* kAspectDisplayNames[kAspectCount] = {
    "Feet apart",           "Height off platform", "Distance from platform",
    "Somersault tightness", "Knee straightness",   "Twist tightness",
    "Verticalness",         "Entry straightness",  "Splash size",
};

} // namespace

const char* joint_name(JointId id) { return kJointNames[static_cast<int>(id)]; }

std::optional<JointId> joint_from_name(const std::string& name) {
    for (int i = 0; i < kJointCount; ++i) {
        if (name == kJointNames[i]) return static_cast<JointId>(i);
    }
    return std::nullopt;
}

const char* facing_name(Facing f) { return f == Facing::left ? "left" : "right"; }

const char* rotation_type_name(RotationType t) {
    switch (t) {
        case RotationType::forward: return "forward";
        case RotationType::backward: return "backward";
        case RotationType::reverse: return "reverse";
        case RotationType::inward: return "inward";
    }
    return "?";
}

std::optional<RotationType> rotation_type_from_name(const std::string& name) {
    if (name == "forward") return RotationType::forward;
    if (name == "backward") return RotationType::backward;
    if (name == "reverse") return RotationType::reverse;
    if (name == "inward") return RotationType::inward;
    return std::nullopt;
}

const char* body_position_name(BodyPosition p) {
    switch (p) {
        case BodyPosition::straight: return "straight";
        case BodyPosition::pike: return "pike";
        case BodyPosition::tuck: return "tuck";
        case BodyPosition::free_position: return "free";
    }
    return "?";
}

std::optional<BodyPosition> body_position_from_name(const std::string& name) {
    if (name == "straight") return BodyPosition::straight;
    if (name == "pike") return BodyPosition::pike;
    if (name == "tuck") return BodyPosition::tuck;
    if (name == "free") return BodyPosition::free_position;
    return std::nullopt;
}

const char* aspect_name(AspectId a) { return kAspectNames[static_cast<int>(a)]; }

const char* aspect_display_name(AspectId a) {
    return kAspectDisplayNames[static_cast<int>(a)];
}

std::optional<AspectId> aspect_from_name(const std::string& name) {
    for (int i = 0; i < kAspectCount; ++i) {
        if (name == kAspectNames[i]) return static_cast<AspectId>(i);
    }
    return std::nullopt;
}

const char* unit_name(MetricUnit u) {
    switch (u) {
        case MetricUnit::degrees: return "degrees";
        case MetricUnit::torso_lengths: return "torso_lengths";
        case MetricUnit::fraction: return "fraction";
    }
    return "?";
}

const char* polarity_name(MetricPolarity p) {
    switch (p) {
        case MetricPolarity::lower_is_better: return "lower_is_better";
        case MetricPolarity::higher_is_better: return "higher_is_better";
        case MetricPolarity::band_is_better: return "band_is_better";
    }
    return "?";
}

const char* distance_category_name(DistanceCategory c) {
    switch (c) {
        case DistanceCategory::too_close: return "too_close";
        case DistanceCategory::good: return "good";
        case DistanceCategory::too_far: return "too_far";
    }
    return "?";
}

void validate_config(const AnalyzerConfig& cfg) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            raise(ErrorKind::SchemaViolation,
                  std::string("config: ") + name + " must be positive and finite");
    };
    positive(cfg.som_angle_threshold_deg, "som_angle_threshold_deg");
    positive(cfg.takeoff_distance_threshold, "takeoff_distance_threshold");
    positive(cfg.petal_inner_radius, "petal_inner_radius");
    positive(cfg.petal_outer_radius, "petal_outer_radius");
    positive(cfg.position_knee_tuck_deg, "position_knee_tuck_deg");
    positive(cfg.position_hip_tuck_deg, "position_hip_tuck_deg");
    positive(cfg.position_hip_pike_deg, "position_hip_pike_deg");
    positive(cfg.position_straight_deg, "position_straight_deg");
    if (cfg.som_angle_threshold_deg >= 90.0)
        raise(ErrorKind::SchemaViolation,
              "config: som_angle_threshold_deg must lie in (0, 90)");
    if (cfg.petal_inner_radius >= cfg.petal_outer_radius)
        raise(ErrorKind::SchemaViolation,
              "config: petal_inner_radius must be smaller than petal_outer_radius");
    if (cfg.max_gap < 0)
        raise(ErrorKind::SchemaViolation, "config: max_gap must be non-negative");
    if (cfg.min_confidence < 0.0 || cfg.min_confidence > 1.0)
        raise(ErrorKind::SchemaViolation, "config: min_confidence must lie in [0, 1]");
}

void config_set(AnalyzerConfig& cfg, const std::string& key, const std::string& value) {
    AnalyzerConfig next = cfg; // commit only when the result validates
    auto parse_double = [&](double& slot) {
        const char* begin = value.data();
        const char* end = begin + value.size();
        double parsed = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, parsed);
        if (ec != std::errc{} || ptr != end)
            raise(ErrorKind::SchemaViolation,
                  "config: cannot parse value '" + value + "' for key '" + key + "'");
        slot = parsed;
    };
    auto parse_int = [&](std::int64_t& slot) {
        const char* begin = value.data();
        const char* end = begin + value.size();
        std::int64_t parsed = 0;
        auto [ptr, ec] = std::from_chars(begin, end, parsed);
        if (ec != std::errc{} || ptr != end)
            raise(ErrorKind::SchemaViolation,
                  "config: cannot parse value '" + value + "' for key '" + key + "'");
        slot = parsed;
    };

    if (key == "som_angle_threshold_deg") parse_double(next.som_angle_threshold_deg);
    else if (key == "takeoff_distance_threshold") parse_double(next.takeoff_distance_threshold);
    else if (key == "petal_inner_radius") parse_double(next.petal_inner_radius);
    else if (key == "petal_outer_radius") parse_double(next.petal_outer_radius);
    else if (key == "position_knee_tuck_deg") parse_double(next.position_knee_tuck_deg);
    else if (key == "position_hip_tuck_deg") parse_double(next.position_hip_tuck_deg);
    else if (key == "position_hip_pike_deg") parse_double(next.position_hip_pike_deg);
    else if (key == "position_straight_deg") parse_double(next.position_straight_deg);
    else if (key == "max_gap") parse_int(next.max_gap);
    else if (key == "min_confidence") parse_double(next.min_confidence);
    else raise(ErrorKind::UnknownConfigKey, "config: unknown key '" + key + "'");

    validate_config(next);
    cfg = next;
}

} // namespace nsaqa
