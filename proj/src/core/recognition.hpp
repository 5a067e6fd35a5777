#ifndef NSAQA_CORE_RECOGNITION_HPP
#define NSAQA_CORE_RECOGNITION_HPP

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace nsaqa {

/// True when the diver is inverted (pelvis above thorax in the math frame)
/// for the majority of usable takeoff frames.
bool detect_armstand(const SymbolStream& s, std::int64_t takeoff_end,
                     const AnalyzerConfig& cfg);

/// Somersault counter state after a full pass: the count plus the frame at
/// which each increment fired (used to window the rotation-direction check).
struct SomersaultTrace {
    int count = 0;
    std::vector<std::int64_t> increment_frames;
};

/// Walks every post-takeoff frame with a usable pelvis-to-thorax vector,
/// alternating the target between vertical-down and vertical-up (parity
/// flipped for armstand takeoffs) and counting frames where the angle to the
/// target drops to the threshold. The parity flip after each increment is
/// what debounces consecutive sub-threshold frames.
SomersaultTrace trace_half_somersaults(const SymbolStream& s, std::int64_t takeoff_end,
                                       bool armstand, const AnalyzerConfig& cfg);

int count_half_somersaults(const SymbolStream& s, std::int64_t takeoff_end, bool armstand,
                           const AnalyzerConfig& cfg);

/// Twist-petal detection over the right-to-left hip vector magnitude.
struct TwistTrace {
    struct Petal {
        size_t rise_pos = 0; // positions into `frames`
        size_t fall_pos = 0;
        double apex = 0.0;
    };
    std::vector<std::int64_t> frames; // post-takeoff frames with usable hips
    std::vector<double> magnitude;    // median-smoothed |l_hip - r_hip|
    double reference_length = 0.0;    // petal reference L
    bool active = false;              // hip span ever left the profile floor
    std::vector<Petal> petals;

    int count() const { return static_cast<int>(petals.size()); }
};

/// A petal is a maximal excursion of the (smoothed) hip-vector magnitude
/// that rises from below petal_inner_radius*L to a peak no higher than
/// petal_outer_radius*L and returns below the inner radius. One petal is
/// half a twist.
TwistTrace trace_twist_petals(const SymbolStream& s, std::int64_t takeoff_end,
                              const AnalyzerConfig& cfg);

int count_half_twists(const SymbolStream& s, std::int64_t takeoff_end,
                      const AnalyzerConfig& cfg);

RotationType classify_rotation_type(const SymbolStream& s, std::int64_t takeoff_end,
                                    bool armstand, const AnalyzerConfig& cfg);

BodyPosition classify_position(const SymbolStream& s, FrameRange somersault_range,
                               const AnalyzerConfig& cfg);

/// Full recognition pass: gap interpolation, takeoff detection, then the
/// individual recognizers in dependency order.
DiveDescriptor recognize(const SymbolStream& s, const AnalyzerConfig& cfg);

} // namespace nsaqa

#endif
