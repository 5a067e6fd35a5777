#ifndef NSAQA_CORE_KINEMATICS_HPP
#define NSAQA_CORE_KINEMATICS_HPP

#include <span>
#include <vector>

#include "types.hpp"

namespace nsaqa {

/// Converts an image-frame vector (y down) to the math frame (y up) all
/// angular rules are written in. Applied exactly once, at the point a rule
/// reads joint data.
inline Vec2 to_math_vec(Vec2 image_vec) { return {image_vec.x, -image_vec.y}; }

double norm(Vec2 v);

/// Unsigned angle between two nonzero vectors, degrees in [0, 180].
double angle_between(Vec2 v1, Vec2 v2);

/// Interior angle at b formed by rays b->a and b->c, degrees in [0, 180].
double joint_angle(Vec2 a, Vec2 b, Vec2 c);

/// Total signed rotation of a vector sequence, degrees, counterclockwise
/// positive in the math frame. Steps are the minimal signed angle between
/// consecutive vectors; a single step of 150 degrees or more is treated as
/// undersampling and rejected (AliasingSuspected).
double accumulate_rotation(std::span<const Vec2> vectors);

/// Cumulative unwrapped direction angle per sample, degrees; first entry is
/// the direction of the first vector, each following entry adds the signed
/// step. Same aliasing guard as accumulate_rotation.
std::vector<double> unwrap_directions(std::span<const Vec2> vectors);

/// Median pelvis-to-thorax distance over frames where both joints meet the
/// confidence floor. The unit every other rule normalizes distances by.
double torso_length_reference(const SymbolStream& s, const AnalyzerConfig& cfg);

/// True when the joint exists with confidence >= cfg.min_confidence.
bool joint_usable(const Pose& pose, JointId id, const AnalyzerConfig& cfg);

double median(std::vector<double> values);

/// Nearest-rank percentile (q in [0,1]) of an unsorted sample.
double percentile_nearest_rank(std::vector<double> values, double q);

} // namespace nsaqa

#endif
