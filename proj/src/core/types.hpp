#ifndef NSAQA_CORE_TYPES_HPP
#define NSAQA_CORE_TYPES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsaqa {

/// 2D vector / point. Stream coordinates are image-convention (y grows
/// downward); rule code converts to a y-up math frame via to_math_vec().
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// The 16 MPII keypoints, in canonical serialization order.
enum class JointId : int {
    head_top = 0,
    upper_neck,
    thorax,
    pelvis,
    r_shoulder,
    l_shoulder,
    r_elbow,
    l_elbow,
    r_wrist,
    l_wrist,
    r_hip,
    l_hip,
    r_knee,
    l_knee,
    r_ankle,
    l_ankle,
};

inline constexpr int kJointCount = 16;

const char* joint_name(JointId id);
std::optional<JointId> joint_from_name(const std::string& name);

struct Joint {
    Vec2 pt;
    double confidence = 0.0; // 0 means "unobserved"

    friend bool operator==(const Joint&, const Joint&) = default;
};

struct Pose {
    std::array<Joint, kJointCount> joints{};

    const Joint& operator[](JointId id) const { return joints[static_cast<int>(id)]; }
    Joint& operator[](JointId id) { return joints[static_cast<int>(id)]; }

    friend bool operator==(const Pose&, const Pose&) = default;
};

struct SplashObservation {
    double area = 0.0;                  // pixels^2
    std::array<double, 4> bbox{};       // x, y, w, h

    friend bool operator==(const SplashObservation&, const SplashObservation&) = default;
};

enum class Facing { left, right };

const char* facing_name(Facing f);

/// Clip-level platform geometry. `facing` is the horizontal direction from
/// the platform toward the pool; `water_y` is the water surface row.
struct PlatformGeometry {
    Vec2 edge_point;
    Facing facing = Facing::right;
    double water_y = 0.0;

    /// +1 when the pool lies toward +x, -1 toward -x.
    double pool_sign() const { return facing == Facing::right ? 1.0 : -1.0; }

    friend bool operator==(const PlatformGeometry&, const PlatformGeometry&) = default;
};

struct FrameSymbols {
    std::int64_t frame_index = 0;
    std::optional<Pose> pose;
    std::optional<SplashObservation> splash;

    friend bool operator==(const FrameSymbols&, const FrameSymbols&) = default;
};

struct SymbolStream {
    std::string clip_id;
    double fps = 0.0;
    double frame_width = 0.0;
    double frame_height = 0.0;
    PlatformGeometry platform;
    std::vector<FrameSymbols> frames;

    friend bool operator==(const SymbolStream&, const SymbolStream&) = default;
};

/// Inclusive frame-index range.
struct FrameRange {
    std::int64_t start = 0;
    std::int64_t end = -1;

    bool empty() const { return end < start; }
    std::int64_t length() const { return empty() ? 0 : end - start + 1; }
    bool contains(std::int64_t f) const { return f >= start && f <= end; }

    friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

enum class RotationType { forward, backward, reverse, inward };
enum class BodyPosition { straight, pike, tuck, free_position };

const char* rotation_type_name(RotationType t);
std::optional<RotationType> rotation_type_from_name(const std::string& name);
const char* body_position_name(BodyPosition p);
std::optional<BodyPosition> body_position_from_name(const std::string& name);

struct DiveDescriptor {
    bool armstand = false;
    RotationType rotation_type = RotationType::forward;
    int half_somersaults = 0;
    int half_twists = 0;
    BodyPosition position = BodyPosition::straight;

    friend bool operator==(const DiveDescriptor&, const DiveDescriptor&) = default;
};

struct PhaseSegmentation {
    FrameRange takeoff;
    std::optional<FrameRange> twist;
    std::optional<FrameRange> somersault;
    FrameRange entry;

    friend bool operator==(const PhaseSegmentation&, const PhaseSegmentation&) = default;
};

/// Tunable thresholds for all rule modules. Defaults follow the analyzer's
/// reference configuration; every field is addressable by name through
/// config_set() (CLI --set key=value).
struct AnalyzerConfig {
    double som_angle_threshold_deg = 75.0;
    double takeoff_distance_threshold = 0.5; // torso-lengths past the edge
    double petal_inner_radius = 0.5;         // fraction of reference hip length
    double petal_outer_radius = 1.1;
    double position_knee_tuck_deg = 110.0;
    double position_hip_tuck_deg = 110.0;
    double position_hip_pike_deg = 120.0;
    double position_straight_deg = 160.0;
    std::int64_t max_gap = 3;                // frames bridged by interpolation
    double min_confidence = 0.1;
};

/// Validates ranges (positive thresholds, inner < outer, angle in (0,90)).
void validate_config(const AnalyzerConfig& cfg);

/// Sets one field by key with a string value; throws UnknownConfigKey /
/// SchemaViolation on bad key or unparsable value.
void config_set(AnalyzerConfig& cfg, const std::string& key, const std::string& value);

enum class AspectId : int {
    feet_apart = 0,
    height_off_platform,
    distance_from_platform,
    somersault_tightness,
    knee_straightness,
    twist_tightness,
    verticalness,
    entry_straightness,
    splash_size,
};

inline constexpr int kAspectCount = 9;

const char* aspect_name(AspectId a);
const char* aspect_display_name(AspectId a);
std::optional<AspectId> aspect_from_name(const std::string& name);

enum class MetricUnit { degrees, torso_lengths, fraction };
enum class MetricPolarity { lower_is_better, higher_is_better, band_is_better };

const char* unit_name(MetricUnit u);
const char* polarity_name(MetricPolarity p);

struct EvidenceEntry {
    std::int64_t frame = 0;
    double severity = 0.0;

    friend bool operator==(const EvidenceEntry&, const EvidenceEntry&) = default;
};

struct RawMetric {
    AspectId aspect = AspectId::feet_apart;
    double value = 0.0;
    MetricUnit unit = MetricUnit::degrees;
    MetricPolarity polarity = MetricPolarity::lower_is_better;
    std::vector<EvidenceEntry> evidence; // sorted by severity, worst first
};

enum class DistanceCategory { too_close, good, too_far };

const char* distance_category_name(DistanceCategory c);

struct AspectScore {
    AspectId aspect = AspectId::feet_apart;
    bool applicable = false;
    std::optional<RawMetric> raw;
    double percentile = 0.0; // meaningful only when applicable
    double display = 0.0;    // percentile / 10, one decimal
    std::optional<DistanceCategory> category; // distance aspect only
};

} // namespace nsaqa

#endif
