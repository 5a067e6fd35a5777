#include "kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace nsaqa {

namespace {
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
constexpr double kAliasingStepDeg = 150.0;
} // namespace

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double angle_between(Vec2 v1, Vec2 v2) {
    if (norm(v1) == 0.0 || norm(v2) == 0.0)
        raise(ErrorKind::ZeroVector, "angle_between: zero-length vector");
    const double dot = v1.x * v2.x + v1.y * v2.y;
    const double cross = v1.x * v2.y - v1.y * v2.x;
    return std::atan2(std::fabs(cross), dot) * kRadToDeg;
}

double joint_angle(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 ba = a - b;
    const Vec2 bc = c - b;
    if (norm(ba) == 0.0 || norm(bc) == 0.0)
        raise(ErrorKind::DegenerateJoint, "joint_angle: coincident points");
    return angle_between(ba, bc);
}

namespace {

double signed_step_deg(Vec2 from, Vec2 to) {
    const double dot = from.x * to.x + from.y * to.y;
    const double cross = from.x * to.y - from.y * to.x;
    return std::atan2(cross, dot) * kRadToDeg;
}

} // namespace

double accumulate_rotation(std::span<const Vec2> vectors) {
    double total = 0.0;
    for (size_t i = 0; i < vectors.size(); ++i) {
        if (norm(vectors[i]) == 0.0)
            raise(ErrorKind::ZeroVector, "accumulate_rotation: zero-length vector");
        if (i == 0) continue;
        const double step = signed_step_deg(vectors[i - 1], vectors[i]);
        if (std::fabs(step) >= kAliasingStepDeg)
            raise(ErrorKind::AliasingSuspected,
                  "accumulate_rotation: step of " + std::to_string(step) +
                      " degrees suggests undersampling");
        total += step;
    }
    return total;
}

std::vector<double> unwrap_directions(std::span<const Vec2> vectors) {
    std::vector<double> out;
    out.reserve(vectors.size());
    double current = 0.0;
    for (size_t i = 0; i < vectors.size(); ++i) {
        if (norm(vectors[i]) == 0.0)
            raise(ErrorKind::ZeroVector, "unwrap_directions: zero-length vector");
        if (i == 0) {
            current = std::atan2(vectors[0].y, vectors[0].x) * kRadToDeg;
        } else {
            const double step = signed_step_deg(vectors[i - 1], vectors[i]);
            if (std::fabs(step) >= kAliasingStepDeg)
                raise(ErrorKind::AliasingSuspected,
                      "unwrap_directions: step of " + std::to_string(step) +
                          " degrees suggests undersampling");
            current += step;
        }
        out.push_back(current);
    }
    return out;
}

bool joint_usable(const Pose& pose, JointId id, const AnalyzerConfig& cfg) {
    return pose[id].confidence >= cfg.min_confidence;
}

double torso_length_reference(const SymbolStream& s, const AnalyzerConfig& cfg) {
    std::vector<double> lengths;
    for (const auto& frame : s.frames) {
        if (!frame.pose) continue;
        const Pose& p = *frame.pose;
        if (!joint_usable(p, JointId::pelvis, cfg) || !joint_usable(p, JointId::thorax, cfg))
            continue;
        const double len = norm(p[JointId::thorax].pt - p[JointId::pelvis].pt);
        if (len > 0.0) lengths.push_back(len);
    }
    if (lengths.empty())
        raise(ErrorKind::NoUsablePose,
              "torso_length_reference: no frame with confident pelvis and thorax");
    return median(std::move(lengths));
}

double median(std::vector<double> values) {
    const size_t n = values.size();
    std::sort(values.begin(), values.end());
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double percentile_nearest_rank(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

} // namespace nsaqa
