#include "pipeline.hpp"

#include "recognition.hpp"
#include "segmentation.hpp"
#include "stream_io.hpp"

namespace nsaqa {

DiveReport analyze_stream(const SymbolStream& s, const ReferenceDistribution& ref,
                          const AnalyzerConfig& cfg,
                          const std::optional<WeightProfile>& weights,
                          const TemplateLibrary& library) {
    validate_config(cfg);
    const SymbolStream stream = interpolate_poses(s, cfg.max_gap);

    DiveAnalysis analysis;
    analysis.clip_id = stream.clip_id;
    analysis.descriptor = recognize(stream, cfg);
    analysis.segmentation = segment(stream, analysis.descriptor, cfg);
    analysis.scores =
        score_aspects(stream, analysis.descriptor, analysis.segmentation, ref, cfg);
    analysis.overall = aggregate(analysis.scores, weights);
    return compose_report(stream, analysis, library);
}

} // namespace nsaqa
