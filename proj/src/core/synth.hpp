#ifndef NSAQA_CORE_SYNTH_HPP
#define NSAQA_CORE_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace nsaqa::synth {

/// Fully resolved kinematic script for one synthetic dive. Frame-indexed
/// angle rates are stored explicitly; they integrate exactly to the
/// descriptor's half-counts times 180 degrees.
struct DiveScript {
    std::string clip_id;
    DiveDescriptor descriptor;
    double fps = 30.0;
    std::int64_t frame_count = 0;
    double frame_width = 1280.0;
    double frame_height = 720.0;
    PlatformGeometry platform;
    double torso_px = 55.0;

    std::int64_t jump_frame = 0;          // first airborne frame
    std::int64_t water_contact_frame = 0; // first frame without a pose
    std::int64_t apex_frame = 0;
    double apex_height_torso = 0.0;       // pelvis apex above the platform edge
    double pool_speed_torso = 0.05;       // horizontal speed, torso-lengths/frame

    std::int64_t rotation_start_frame = 0; // somersault rotation window [start, end)
    std::int64_t rotation_end_frame = 0;
    std::int64_t twist_start_frame = 0;    // twist window [start, end); start==end => none
    std::int64_t twist_end_frame = 0;

    std::vector<double> som_rate_deg;   // per-frame somersault rate (signed)
    std::vector<double> twist_rate_deg; // per-frame twist rate (unsigned)

    // joint-angle targets during the somersault's position window
    double position_hip_deg = 176.0;
    double position_knee_deg = 176.0;
    double feet_apart_deg = 0.0;
    double entry_tilt_deg = 0.0;        // body-line deviation from vertical at entry
    double entry_knee_bend_deg = 2.0;

    std::vector<std::pair<std::int64_t, double>> splash_schedule; // (frame, area px^2)

    double noise_sigma = 0.0;   // per-joint Gaussian pixel noise
    double pose_dropout = 0.0;  // per-frame probability of a dropped pose
};

/// Everything the generator knows to be true about an emitted stream,
/// computed from the clean (noise-free) joint positions.
struct GroundTruth {
    std::string clip_id;
    DiveDescriptor descriptor;
    PhaseSegmentation phases;
    double torso_px = 0.0;
    std::int64_t jump_frame = 0;
    std::int64_t water_contact_frame = 0;

    // raw aspect values; absent where the aspect does not apply
    std::array<std::optional<double>, kAspectCount> aspects{};
    std::optional<DistanceCategory> distance_category;
};

std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);

/// High-level knobs from which build_script derives a full DiveScript.
struct ScriptParams {
    std::string clip_id = "synth";
    DiveDescriptor descriptor{false, RotationType::forward, 2, 0, BodyPosition::pike};
    double fps = 30.0;
    double frame_width = 1280.0;
    double frame_height = 720.0;
    Facing facing = Facing::right;
    double torso_px = 55.0;
    std::int64_t stance_frames = 28;
    std::int64_t flight_frames = 0; // 0 = derive from rotation budgets
    double apex_extra_torso = 0.8;  // apex above the stance pelvis height
    double pool_speed_torso = 0.05;
    double feet_apart_deg = 4.0;
    double entry_tilt_deg = 3.0;
    double entry_knee_bend_deg = 2.0;
    double splash_peak_fraction = 0.006; // of frame area; <= 0 means no splash
    double noise_sigma = 0.0;
    double pose_dropout = 0.0;
};

/// Expands params into a frame-exact script. Throws InfeasibleScript when the
/// descriptor cannot be realized (zero somersaults, twist budget that does
/// not fit the flight, tuck/pike with more than 2 half-twists).
DiveScript build_script(const ScriptParams& params);

/// Renders the script into a symbol stream plus its ground truth.
/// Deterministic for equal (script, seed).
std::pair<SymbolStream, GroundTruth> generate(const DiveScript& script, std::uint64_t seed);

/// Draws n randomized scripts covering armstand, all rotation types,
/// half-somersaults 1..9, half-twists 0..8 and all positions, then generates
/// them. Deterministic for equal (n, seed, noise, dropout); entries are
/// independent of each other (safe to generate in parallel by index).
std::vector<std::pair<SymbolStream, GroundTruth>> sample_corpus(std::int64_t n,
                                                                std::uint64_t seed,
                                                                double noise_sigma = 0.0,
                                                                double pose_dropout = 0.0);

/// Single corpus entry without materializing the rest (same stream the
/// corpus at the same seed would contain).
std::pair<SymbolStream, GroundTruth> sample_one(std::uint64_t seed, std::int64_t index,
                                                double noise_sigma = 0.0,
                                                double pose_dropout = 0.0);

} // namespace nsaqa::synth

#endif
