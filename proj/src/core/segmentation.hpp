#ifndef NSAQA_CORE_SEGMENTATION_HPP
#define NSAQA_CORE_SEGMENTATION_HPP

#include <cstdint>
#include <optional>

#include "types.hpp"

namespace nsaqa {

/// First frame whose nearest foot lies more than
/// takeoff_distance_threshold torso-lengths past the platform edge, measured
/// toward the pool. Every earlier frame belongs to the start/takeoff phase.
/// Throws NeverLeavesPlatform when no frame qualifies.
std::int64_t detect_takeoff_end(const SymbolStream& s, const AnalyzerConfig& cfg);

/// Entry phase: starts when the pelvis sinks within one torso-length of the
/// water surface or at the first splash, whichever is earlier; ends at the
/// last splash frame (last frame when no splash was seen).
FrameRange detect_entry(const SymbolStream& s, const AnalyzerConfig& cfg);

/// Frames within `flight` over which the pelvis-to-thorax rotation is still
/// progressing toward its final total. Boundaries are extrapolated to the
/// onset/stop of angular motion. nullopt when no net rotation is visible.
std::optional<FrameRange> compute_somersault_range(const SymbolStream& s, FrameRange flight,
                                                   const AnalyzerConfig& cfg);

/// Frames within `flight` spanned by hip-vector petal activity, extrapolated
/// outward from the first rise and last fall of the petal excursions.
/// nullopt when no petal was detected.
std::optional<FrameRange> compute_twist_range(const SymbolStream& s,
                                              std::int64_t takeoff_end, FrameRange flight,
                                              const AnalyzerConfig& cfg);

/// Full phase segmentation for a recognized dive. Twist and somersault
/// ranges are only reported when the descriptor calls for them.
PhaseSegmentation segment(const SymbolStream& s, const DiveDescriptor& d,
                          const AnalyzerConfig& cfg);

} // namespace nsaqa

#endif
