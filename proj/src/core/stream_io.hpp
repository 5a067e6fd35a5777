#ifndef NSAQA_CORE_STREAM_IO_HPP
#define NSAQA_CORE_STREAM_IO_HPP

#include <string>
#include <string_view>

#include "types.hpp"

namespace nsaqa {

/// Parses the line-delimited symbol-stream document (header record followed
/// by one frame record per line, see SCHEMA.md) and validates every stream
/// invariant. Throws MalformedDocument on syntax errors, SchemaViolation on
/// missing/mistyped fields (naming the field), InvariantViolation on
/// violated stream invariants (naming the frame where applicable).
SymbolStream parse_stream(std::string_view bytes);

/// Serializes with fixed field order; output is byte-deterministic and
/// round-trips: parse_stream(serialize_stream(s)) == s.
std::string serialize_stream(const SymbolStream& s);

/// Fills pose gaps of at most max_gap frames by per-joint linear
/// interpolation (confidence = min of the endpoint confidences). Longer gaps
/// and frames that already have poses are left untouched. Idempotent.
SymbolStream interpolate_poses(const SymbolStream& s, std::int64_t max_gap);

} // namespace nsaqa

#endif
