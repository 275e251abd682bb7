#ifndef RUELLE_REPORT_JSON_HPP
#define RUELLE_REPORT_JSON_HPP

#include <json.hpp>

#include "ruelle/diagnostics.hpp"

namespace ruelle {

using ordered_json = nlohmann::ordered_json;

ordered_json json_complex(cplx z);
cplx complex_from_json(const ordered_json& j);

ordered_json to_json(const SeriesClassification& c);
ordered_json to_json(const QuadraticCriterionResult& r);
ordered_json to_json(const ColletEckmannResult& r);
ordered_json to_json(const CesaroConditionResult& r);
ordered_json to_json(const ResolventMassResult& r);
ordered_json to_json(const SeriesRelationReport& r);
ordered_json to_json(const ProbeReport& r);
ordered_json to_json(const EssentialNeighborhood& u);
ordered_json to_json(const DiagnosticsReport& r);

// map specification files:
//   {"numerator": [[re,im],...], "denominator": [[re,im],...]}
//   {"quadratic_c": [re, im]}
RationalMap map_from_json(const ordered_json& j);
ordered_json map_to_json(const RationalMap& R);

}  // namespace ruelle

#endif
