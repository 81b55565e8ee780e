#pragma once

#include <nlohmann/json.hpp>

#include "concfn/atomic_measure.hpp"
#include "concfn/bound_report.hpp"
#include "concfn/concentration.hpp"
#include "concfn/discrete_dist.hpp"
#include "concfn/gap.hpp"
#include "concfn/inverse.hpp"
#include "concfn/smoothing.hpp"

namespace concfn {

using json = nlohmann::json;

// Rationals travel as "p/q" strings; atom positions are emitted as JSON
// numbers when the value round-trips through double exactly, as strings
// otherwise. Both forms are accepted on input.

json dist_to_json(const DiscreteDist& dist);
DiscreteDist dist_from_json(const json& j);

json weights_to_json(const WeightVector& a);
WeightVector weights_from_json(const json& j);

json gap_to_json(const SymmetricGAP& k);
SymmetricGAP gap_from_json(const json& j);

json measure_to_json(const AtomicMeasure& w);
AtomicMeasure measure_from_json(const json& j);

json concentration_to_json(const ConcentrationResult& r);
json coverage_to_json(const CoverageReport& r);
json bound_report_to_json(const BoundReport& r);
BoundReport bound_report_from_json(const json& j);
json mass_at_zero_to_json(const MassAtZeroResult& r);
json esseen_to_json(const EsseenResult& r);
json inverse_report_to_json(const InversePrincipleReport& r);
json region_report_to_json(const RegionWitnessReport& r);
json planted_to_json(const PlantedInstance& inst);

// CSV (header + rows, LF endings, UTF-8).
std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& r);

}  // namespace concfn
