#include "ruelle/report_json.hpp"

namespace ruelle {

ordered_json json_complex(cplx z) {
    return ordered_json::array({z.real(), z.imag()});
}

cplx complex_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2)
        throw precondition_error("complex values are [re, im] arrays");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

ordered_json to_json(const SeriesClassification& c) {
    return ordered_json{{"class", to_string(c.cls)},
                        {"ratio_limsup", c.ratio_limsup},
                        {"tail_fraction", c.tail_fraction},
                        {"terms_in_band", c.terms_in_band},
                        {"max_abs_term", c.max_abs_term},
                        {"logfit_coeff", c.logfit_coeff},
                        {"logfit_r2", c.logfit_r2},
                        {"partial_sums_grow", c.partial_sums_grow},
                        {"upto", c.upto},
                        {"stable", c.stable}};
}

ordered_json to_json(const QuadraticCriterionResult& r) {
    ordered_json j{{"verdict", to_string(r.verdict)},
                   {"N", r.N},
                   {"failing_index", r.failing_index},
                   {"witness_suffix_start", r.witness_suffix_start},
                   {"band_center_log2", r.band_center_log2}};
    j["config"] = ordered_json{{"min_subsequence", r.config.min_subsequence},
                               {"s_floor", r.config.s_floor},
                               {"band_halfwidth_log2", r.config.band_halfwidth_log2},
                               {"growth_min_log2", r.config.growth_min_log2},
                               {"s_growth_factor", r.config.s_growth_factor},
                               {"degenerate_radius", r.config.degenerate_radius}};
    j["witness"] = r.witness;
    j["log2_abs_D"] = r.log2_abs_D;
    ordered_json s = ordered_json::array();
    for (cplx v : r.S) s.push_back(json_complex(v));
    j["S"] = s;
    return j;
}

ordered_json to_json(const ColletEckmannResult& r) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pairs) {
        ordered_json cases = ordered_json::array();
        for (int c : p.cases) cases.push_back(c);
        pairs.push_back(ordered_json{{"critical_point", json_complex(p.critical_point)},
                                     {"orbit_point", json_complex(p.orbit_point)},
                                     {"rs", to_json(p.rs_class)},
                                     {"rp", to_json(p.rp_class)},
                                     {"cases", cases}});
    }
    ordered_json orbit = ordered_json::array();
    for (cplx z : r.orbit_points) orbit.push_back(json_complex(z));
    return ordered_json{{"overall_case", r.overall_case},
                        {"N", r.N},
                        {"orbit_points", orbit},
                        {"pairs", pairs}};
}

ordered_json to_json(const CesaroConditionResult& r) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json vals = ordered_json::array();
        for (const auto& e : row.values)
            vals.push_back(ordered_json{{"N", e.N},
                                        {"value", e.value},
                                        {"value_log2", e.value_log2}});
        rows.push_back(ordered_json{{"x", json_complex(row.x)},
                                    {"values", vals},
                                    {"excluded_j", row.excluded_j},
                                    {"bounded", row.bounded}});
    }
    return ordered_json{{"bounded", r.bounded},
                        {"max_value", r.max_value},
                        {"bound", r.config.bound},
                        {"rows", rows}};
}

ordered_json to_json(const ResolventMassResult& r) {
    return ordered_json{{"verdict", r.verdict},     {"requested", r.requested},
                        {"values", r.values},       {"values_log2", r.values_log2},
                        {"long_orbit", r.long_orbit}, {"error", r.error},
                        {"failed_at", r.failed_at}};
}

ordered_json to_json(const SeriesRelationReport& r) {
    ordered_json vars = ordered_json::array();
    for (const auto& v : r.variants)
        vars.push_back(ordered_json{{"relation", v.relation},
                                    {"sign", std::string(1, v.sign)},
                                    {"argument", v.argument},
                                    {"lhs", json_complex(v.lhs)},
                                    {"rhs", json_complex(v.rhs)},
                                    {"residual_abs", v.residual_abs},
                                    {"residual_rel", v.residual_rel}});
    ordered_json j{{"a", json_complex(r.a)},
                   {"x", json_complex(r.x)},
                   {"N", r.N},
                   {"variants", vars}};
    if (r.best_relation1 >= 0) {
        const auto& b = r.variants[r.best_relation1];
        j["best_relation1"] = ordered_json{{"sign", std::string(1, b.sign)},
                                           {"argument", b.argument},
                                           {"residual_rel", b.residual_rel}};
    }
    if (r.best_relation2 >= 0) {
        const auto& b = r.variants[r.best_relation2];
        j["best_relation2"] = ordered_json{{"sign", std::string(1, b.sign)},
                                           {"argument", b.argument},
                                           {"residual_rel", b.residual_rel}};
    }
    return j;
}

ordered_json to_json(const ProbeReport& r) {
    ordered_json trails = ordered_json::array();
    for (const auto& t : r.trails) {
        ordered_json vals = ordered_json::array();
        for (cplx v : t.values) vals.push_back(json_complex(v));
        trails.push_back(ordered_json{{"name", t.name},
                                      {"verdict", t.verdict},
                                      {"tail_max_diff", t.tail_max_diff},
                                      {"max_abs", t.max_abs},
                                      {"subsequence_verdicts", t.subsequence_verdicts},
                                      {"values", vals},
                                      {"values_log2_abs", t.values_log2_abs}});
    }
    return ordered_json{{"L", r.L},
                        {"converges_on_family", r.converges_on_family},
                        {"witness", r.witness},
                        {"shared_subsequence_ratios", r.shared_subsequence_ratios},
                        {"atoms_in_U_fraction", r.atoms_in_U_fraction},
                        {"measures_truncated", r.measures_truncated},
                        {"trails", trails}};
}

ordered_json to_json(const EssentialNeighborhood& u) {
    ordered_json disks = ordered_json::array();
    for (const auto& d : u.excluded)
        disks.push_back(
            ordered_json{{"center", json_complex(d.center)}, {"radius", d.radius}});
    return ordered_json{{"outer_radius", u.outer_radius}, {"excluded", disks}};
}

ordered_json to_json(const DiagnosticsReport& r) {
    ordered_json j;
    j["map"] = r.map_description;
    j["hypotheses"] =
        ordered_json{{"simple_critical_points", r.hypotheses.simple_critical_points},
                     {"no_critical_relations", r.hypotheses.no_critical_relations},
                     {"relation_depth", r.hypotheses.relation_depth},
                     {"detail", r.hypotheses.detail}};
    j["quadratic_criterion"] =
        r.quadratic ? to_json(*r.quadratic) : ordered_json{{"skipped", true}};
    j["collet_eckmann"] =
        r.collet_eckmann ? to_json(*r.collet_eckmann) : ordered_json{{"skipped", true}};
    j["cesaro_condition"] = r.cesaro_condition ? to_json(*r.cesaro_condition)
                                               : ordered_json{{"skipped", true}};
    j["resolvent_mass"] =
        r.resolvent_mass ? to_json(*r.resolvent_mass) : ordered_json{{"skipped", true}};
    j["series_relations"] =
        r.relations ? to_json(*r.relations) : ordered_json{{"skipped", true}};
    j["weak_star_probe"] = r.probe ? to_json(*r.probe) : ordered_json{{"skipped", true}};
    j["probe_consistent_with_certificate"] = r.probe_consistent_with_certificate;
    j["notes"] = r.notes;
    j["overall"] = r.overall;
    return j;
}

RationalMap map_from_json(const ordered_json& j) {
    if (j.contains("quadratic_c"))
        return RationalMap::quadratic(complex_from_json(j["quadratic_c"]));
    if (!j.contains("numerator") || !j.contains("denominator"))
        throw precondition_error(
            "map spec needs numerator/denominator or quadratic_c");
    auto read_poly = [](const ordered_json& arr) {
        std::vector<cplx> cs;
        for (const auto& e : arr) cs.push_back(complex_from_json(e));
        return Polynomial(std::move(cs));
    };
    return RationalMap::create(read_poly(j["numerator"]), read_poly(j["denominator"]));
}

ordered_json map_to_json(const RationalMap& R) {
    ordered_json num = ordered_json::array(), den = ordered_json::array();
    for (cplx c : R.numerator().coeffs()) num.push_back(json_complex(c));
    for (cplx c : R.denominator().coeffs()) den.push_back(json_complex(c));
    ordered_json j{{"numerator", num}, {"denominator", den}};
    if (R.quadratic_parameter()) j["quadratic_c"] = json_complex(*R.quadratic_parameter());
    return j;
}

}  // namespace ruelle
