#pragma once

#include <iosfwd>
#include <span>

#include <nlohmann/json.hpp>

#include "semtrace/lsc.hpp"
#include "semtrace/purity.hpp"
#include "semtrace/vectormath.hpp"
#include "semtrace/wsd.hpp"
#include "semtrace/wsi.hpp"

namespace semtrace {

// Undefined values (insufficient members, zero-norm prototypes) serialize
// as JSON null.

nlohmann::json to_json(const SimilaritySummary& summary);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const ClusterProfile& profile);
nlohmann::json to_json(const Heatmap& heatmap);
nlohmann::json to_json(const PurityReport& report);

/// Solution core: k, seed, centroids, assignment (occurrence_id -> cluster),
/// inertia, iterations, trace. Consumers add profiles/heatmap alongside.
nlohmann::json to_json(const ClusteringSolution& solution);

/// Inverse of to_json(ClusteringSolution); extra keys are ignored.
/// Throws ValidationError on a malformed document.
ClusteringSolution solution_from_json(const nlohmann::json& doc);

const char* to_string(InitMethod init);
const char* to_string(Dispersion dispersion);

/// Row/column order follows heatmap.order; "NA" marks undefined cells.
void write_heatmap_csv(const Heatmap& heatmap, std::ostream& out);

/// year, cluster_0..cluster_{k-1}, total, overall_rel_freq
void write_series_csv(const YearSeries& series, std::ostream& out);

/// year_from, year_to, jsd, cdpt (empty when undefined)
void write_change_csv(const ChangeSeries& series, std::ostream& out);

}  // namespace semtrace
