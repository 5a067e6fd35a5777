#ifndef NSAQA_CORE_PIPELINE_HPP
#define NSAQA_CORE_PIPELINE_HPP

#include <optional>

#include "report.hpp"
#include "scoring.hpp"
#include "types.hpp"

namespace nsaqa {

/// parse -> recognize -> segment -> score -> report, on one stream.
DiveReport analyze_stream(const SymbolStream& s, const ReferenceDistribution& ref,
                          const AnalyzerConfig& cfg,
                          const std::optional<WeightProfile>& weights,
                          const TemplateLibrary& library);

} // namespace nsaqa

#endif
