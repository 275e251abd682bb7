#include "ruelle/cli_app.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ruelle/verify_suites.hpp"

namespace fs = std::filesystem;

namespace ruelle {

namespace {

struct RunConfig {
    std::string map_file;
    std::string quadratic_c;
    int n = 64;
    int depth = 6;
    int probe_len = 48;
    std::string grid;  // "x0,y0,x1,y1"
    int res = 0;
    std::string out_dir = "ruelle_out";
    int jobs = 0;
    std::uint64_t seed = 1;
    std::string thresholds_file;

    ClassifyConfig classify;
    QuadraticCriterionConfig quadratic;
    CesaroConditionConfig cesaro;
    ProbeConfig probe;
    double neighborhood_eps = 0.1;
    cplx ce_point{0.3, 0.0};

    ordered_json to_json() const {
        return ordered_json{
            {"map_file", map_file},
            {"quadratic_c", quadratic_c},
            {"n", n},
            {"depth", depth},
            {"probe_len", probe_len},
            {"grid", grid},
            {"res", res},
            {"out_dir", out_dir},
            {"jobs", jobs},
            {"seed", seed},
            {"thresholds",
             ordered_json{{"ratio_limsup_max", classify.ratio_limsup_max},
                          {"tail_fraction_max", classify.tail_fraction_max},
                          {"band_lo", classify.band_lo},
                          {"band_hi", classify.band_hi},
                          {"logfit_r2_min", classify.logfit_r2_min},
                          {"tb_min_subsequence", quadratic.min_subsequence},
                          {"tb_s_floor", quadratic.s_floor},
                          {"tb_band_halfwidth_log2", quadratic.band_halfwidth_log2},
                          {"tb_growth_min_log2", quadratic.growth_min_log2},
                          {"cesaro_bound", cesaro.bound},
                          {"probe_cauchy_tol", probe.cauchy_tol},
                          {"neighborhood_eps", neighborhood_eps},
                          {"ce_point", json_complex(ce_point)}}}};
    }
};

cplx parse_complex_pair(const std::string& s) {
    double re = 0.0, im = 0.0;
    if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) < 1)
        throw precondition_error("expected complex literal re,im: " + s);
    return cplx(re, im);
}

void load_thresholds(RunConfig& cfg) {
    if (cfg.thresholds_file.empty()) return;
    std::ifstream in(cfg.thresholds_file);
    if (!in) throw precondition_error("cannot open thresholds file");
    ordered_json j = ordered_json::parse(in);
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
    };
    get("ratio_limsup_max", cfg.classify.ratio_limsup_max);
    get("tail_fraction_max", cfg.classify.tail_fraction_max);
    get("band_lo", cfg.classify.band_lo);
    get("band_hi", cfg.classify.band_hi);
    get("logfit_r2_min", cfg.classify.logfit_r2_min);
    get("tb_min_subsequence", cfg.quadratic.min_subsequence);
    get("tb_s_floor", cfg.quadratic.s_floor);
    get("tb_band_halfwidth_log2", cfg.quadratic.band_halfwidth_log2);
    get("tb_growth_min_log2", cfg.quadratic.growth_min_log2);
    get("cesaro_bound", cfg.cesaro.bound);
    get("probe_cauchy_tol", cfg.probe.cauchy_tol);
    get("neighborhood_eps", cfg.neighborhood_eps);
    if (j.contains("ce_point")) cfg.ce_point = complex_from_json(j["ce_point"]);
}

RationalMap load_map(const RunConfig& cfg) {
    if (!cfg.quadratic_c.empty())
        return RationalMap::quadratic(parse_complex_pair(cfg.quadratic_c));
    if (cfg.map_file.empty())
        throw precondition_error("one of --map or --quadratic-c is required");
    std::ifstream in(cfg.map_file);
    if (!in) throw precondition_error("cannot open map file: " + cfg.map_file);
    return map_from_json(ordered_json::parse(in));
}

int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("RUELLE_LAB_JOBS")) {
        int j = std::atoi(env);
        if (j > 0) return j;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

std::string describe_map(const RationalMap& R) {
    if (R.quadratic_parameter()) {
        char buf[96];
        cplx c = *R.quadratic_parameter();
        std::snprintf(buf, sizeof buf, "z^2 + c, c = %.17g%+.17gi", c.real(), c.imag());
        return buf;
    }
    return map_to_json(R).dump();
}

void write_measures_jsonl(const RationalMap& R, int L, std::ostream& os) {
    // one atom per line; l = -1 marks raw mu rows, n = -1 marks nu rows
    char buf[256];
    for (int i = 0; i < static_cast<int>(R.critical_values().size()); ++i) {
        MeasureSequence mus = mu_sequence(R, i, L - 1);
        for (int n = 0; n < static_cast<int>(mus.measures.size()); ++n) {
            for (const auto& at : mus.measures[n].atoms) {
                cplx loc = at.location.to_complex();
                std::snprintf(buf, sizeof buf,
                              "{\"i\":%d,\"l\":-1,\"n\":%d,\"loc\":[%.17g,%.17g],"
                              "\"w_log2abs\":%.17g,\"w_arg\":%.17g}\n",
                              i, n, loc.real(), loc.imag(),
                              at.weight.is_zero() ? -4000.0 : at.weight.log2_abs(),
                              std::arg(at.weight.mantissa()));
                os << buf;
            }
        }
        MeasureSequence nus = nu_sequence(R, i, L);
        for (int l = 1; l <= static_cast<int>(nus.measures.size()); ++l) {
            for (const auto& at : nus.measures[l - 1].atoms) {
                cplx loc = at.location.to_complex();
                std::snprintf(buf, sizeof buf,
                              "{\"i\":%d,\"l\":%d,\"n\":-1,\"loc\":[%.17g,%.17g],"
                              "\"w_log2abs\":%.17g,\"w_arg\":%.17g}\n",
                              i, l, loc.real(), loc.imag(),
                              at.weight.is_zero() ? -4000.0 : at.weight.log2_abs(),
                              std::arg(at.weight.mantissa()));
                os << buf;
            }
        }
    }
}

int run_analyze(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    fs::create_directories(fs::path(cfg.out_dir) / "traces");

    DiagnosticsReport rep;
    RationalMap R = load_map(cfg);
    rep.map_description = describe_map(R);

    rep.hypotheses.simple_critical_points = true;  // enforced at construction
    auto rel = check_no_simple_critical_relations(R, std::min(cfg.n, 24), 1e-9);
    rep.hypotheses.no_critical_relations = rel.passed;
    rep.hypotheses.relation_depth = std::min(cfg.n, 24);
    if (!rel.passed && rel.witness) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "R^%d(c1) = R^%d(c2) with c1=%.6g%+.6gi c2=%.6g%+.6gi",
                      rel.witness->n, rel.witness->m, rel.witness->c1.real(),
                      rel.witness->c1.imag(), rel.witness->c2.real(),
                      rel.witness->c2.imag());
        rep.hypotheses.detail = buf;
    }

    bool any_degenerate = false, any_conclusive = false;

    if (R.quadratic_parameter()) {
        rep.quadratic =
            quadratic_criterion_check(*R.quadratic_parameter(), cfg.n, cfg.quadratic);
        using V = QuadraticCriterionResult::Verdict;
        if (rep.quadratic->verdict == V::degenerate) any_degenerate = true;
        if (rep.quadratic->verdict == V::condition1 ||
            rep.quadratic->verdict == V::condition2)
            any_conclusive = true;
    }

    try {
        cplx a = cfg.ce_point;
        rep.collet_eckmann = collet_eckmann_classify(R, a, cfg.n, cfg.classify);
        if (rep.collet_eckmann->overall_case > 0) any_conclusive = true;
        std::vector<int> Ns;
        for (int v : {4, 8, 16, 32})
            if (v <= std::max(4, cfg.n)) Ns.push_back(v);
        rep.cesaro_condition = cesaro_condition_check(R, a, Ns, cfg.cesaro);
        rep.resolvent_mass =
            resolvent_mass_check(R, a, std::min(cfg.depth, 6));
    } catch (const std::exception& e) {
        rep.notes.push_back(std::string("orbit-based sections skipped: ") + e.what());
    }

    try {
        cplx a = cfg.ce_point + cplx(9.7, 0.43);  // generic distant base point
        rep.relations = verify_series_relations(R, a, a + cplx(1.0, 0.2), 8);
    } catch (const std::exception& e) {
        rep.notes.push_back(std::string("series relations skipped: ") + e.what());
    }

    // weak-* probe per critical value; the report keeps the first index and
    // the shared subsequence ratios surviving across all of them
    std::optional<EssentialNeighborhood> U;
    std::vector<ProbeReport> probes;
    try {
        U = build_essential_neighborhood(R, cfg.neighborhood_eps);
        TestFunctionFamily fam = build_test_family(*U);
        for (int i = 0; i < static_cast<int>(R.critical_values().size()); ++i)
            probes.push_back(weak_star_probe(
                [&](int l) { return nu_l(R, i, l); }, fam, cfg.probe_len, &*U,
                cfg.probe));
        if (!probes.empty()) {
            rep.probe = probes.front();
            std::vector<double> shared = probes.front().shared_subsequence_ratios;
            for (const auto& p : probes) {
                std::vector<double> keep;
                for (double r : shared)
                    for (double q : p.shared_subsequence_ratios)
                        if (r == q) keep.push_back(r);
                shared = keep;
            }
            rep.probe->shared_subsequence_ratios = shared;
        }
    } catch (const std::exception& e) {
        rep.notes.push_back(std::string("weak-* probe skipped: ") + e.what());
    }

    if (rep.quadratic && rep.probe) {
        using V = QuadraticCriterionResult::Verdict;
        if (rep.quadratic->verdict == V::condition1) {
            bool growing = false;
            for (const auto& t : rep.probe->trails)
                growing = growing || t.verdict == "growing";
            rep.probe_consistent_with_certificate = !growing;
        }
    }

    if (!rep.hypotheses.no_critical_relations) {
        rep.overall = "hypotheses-violated";
    } else if (any_conclusive) {
        std::string which;
        if (rep.quadratic &&
            rep.quadratic->verdict == QuadraticCriterionResult::Verdict::condition1)
            which = "quadratic criterion, derivative growth (condition 1)";
        else if (rep.quadratic &&
                 rep.quadratic->verdict == QuadraticCriterionResult::Verdict::condition2)
            which = "quadratic criterion, bounded band with divergent sums (condition 2)";
        else
            which = "series classification case " +
                    std::to_string(rep.collet_eckmann->overall_case);
        rep.overall = "certificate: no invariant line field (" + which +
                      "; numerical evidence under the configured thresholds)";
    } else if (any_degenerate) {
        rep.overall = "degenerate";
    } else {
        rep.overall = "inconclusive";
    }

    // trace exports for the quadratic series at the critical point
    try {
        cplx x0 = R.critical_points().empty() ? cplx(0.0) : R.critical_points()[0];
        ForwardSeries fwd = forward_series(R, x0, cfg.n);
        std::ofstream rp(fs::path(cfg.out_dir) / "traces" / "rp.csv");
        export_trace_csv(fwd.rp, rp);
        std::ofstream p(fs::path(cfg.out_dir) / "traces" / "p.csv");
        export_trace_csv(fwd.p, p);
        SeriesTrace rs = backward_rs(R, x0, cfg.ce_point, std::min(cfg.n, 48));
        std::ofstream rsf(fs::path(cfg.out_dir) / "traces" / "rs.csv");
        export_trace_csv(rs, rsf);
        SeriesTrace s = backward_s(R, x0, std::min(cfg.depth, 6));
        std::ofstream sf(fs::path(cfg.out_dir) / "traces" / "s.csv");
        export_trace_csv(s, sf);
    } catch (const std::exception& e) {
        rep.notes.push_back(std::string("trace export incomplete: ") + e.what());
    }

    {
        std::ofstream ms(fs::path(cfg.out_dir) / "measures.jsonl");
        try {
            write_measures_jsonl(R, std::min(cfg.probe_len, 32), ms);
        } catch (const std::exception&) {
        }
    }

    ordered_json out;
    out["config"] = cfg.to_json();
    out["report"] = to_json(rep);
    if (U) out["essential_neighborhood"] = to_json(*U);
    if (probes.size() > 1) {
        ordered_json arr = ordered_json::array();
        for (const auto& p : probes) arr.push_back(to_json(p));
        out["probes_per_critical_value"] = arr;
    }
    std::ofstream rf(fs::path(cfg.out_dir) / "report.json");
    rf << out.dump(2) << "\n";

    if (!rep.hypotheses.no_critical_relations) return 2;
    if (rep.overall == "degenerate") return 3;
    return 0;
}

struct ScanRow {
    cplx c;
    std::string status = "ok";
    std::string verdict;
    int failing_index = -1;
    int witness_start = -1;
    double log2_abs_D_N = 0.0;
    double abs_S_N = 0.0;
    std::string rp_class;
    std::string rs_class;
};

ScanRow scan_cell(cplx c, const RunConfig& cfg) {
    ScanRow row;
    row.c = c;
    try {
        QuadraticCriterionResult q = quadratic_criterion_check(c, cfg.n, cfg.quadratic);
        row.verdict = to_string(q.verdict);
        row.failing_index = q.failing_index;
        row.witness_start = q.witness_suffix_start;
        if (!q.log2_abs_D.empty()) row.log2_abs_D_N = q.log2_abs_D.back();
        if (!q.S.empty()) row.abs_S_N = std::abs(q.S.back());
        if (q.verdict != QuadraticCriterionResult::Verdict::degenerate) {
            RationalMap R = RationalMap::quadratic(c);
            ForwardSeries fwd = forward_series(R, 0.0, cfg.n);
            row.rp_class = to_string(classify(fwd.rp, cfg.classify).cls);
            try {
                SeriesTrace rs = backward_rs(R, 0.0, c, std::min(cfg.n, 32));
                row.rs_class = to_string(classify(rs, cfg.classify).cls);
            } catch (const atom_collision_error&) {
                row.rs_class = "degenerate";
            }
        } else {
            row.rp_class = "degenerate";
            row.rs_class = "degenerate";
        }
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

void write_ppm(const std::vector<ScanRow>& rows, int res, std::ostream& os) {
    os << "P6\n";
    os << "# verdict colors: condition-1 green, condition-2 blue, inconclusive "
          "gray, degenerate red, error black\n";
    os << res << " " << res << "\n255\n";
    for (const auto& row : rows) {
        unsigned char rgb[3] = {40, 40, 40};
        if (row.status != "ok") {
            rgb[0] = rgb[1] = rgb[2] = 0;
        } else if (row.verdict == "condition-1-satisfied") {
            rgb[0] = 30; rgb[1] = 200; rgb[2] = 60;
        } else if (row.verdict == "condition-2-satisfied") {
            rgb[0] = 40; rgb[1] = 90; rgb[2] = 230;
        } else if (row.verdict == "degenerate") {
            rgb[0] = 220; rgb[1] = 40; rgb[2] = 40;
        } else {
            rgb[0] = rgb[1] = rgb[2] = 150;
        }
        os.write(reinterpret_cast<const char*>(rgb), 3);
    }
}

int run_scan(const RunConfig& cfg) {
    double x0, y0, x1, y1;
    if (std::sscanf(cfg.grid.c_str(), "%lf,%lf,%lf,%lf", &x0, &y0, &x1, &y1) != 4)
        throw precondition_error("--grid expects X0,Y0,X1,Y1");
    if (cfg.res < 1) throw precondition_error("--res must be >= 1");
    if (cfg.res > 4096) throw precondition_error("--res exceeds the cap (4096)");

    fs::create_directories(cfg.out_dir);
    fs::create_directories(fs::path(cfg.out_dir) / "plots");

    int res = cfg.res;
    std::vector<cplx> cells(res * res);
    for (int iy = 0; iy < res; ++iy) {
        for (int ix = 0; ix < res; ++ix) {
            double fx = (res == 1) ? 0.5 : double(ix) / (res - 1);
            double fy = (res == 1) ? 0.5 : double(iy) / (res - 1);
            cells[iy * res + ix] = cplx(x0 + fx * (x1 - x0), y0 + fy * (y1 - y0));
        }
    }

    std::vector<ScanRow> rows(cells.size());
    int jobs = resolve_jobs(cfg.jobs);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            rows[i] = scan_cell(cells[i], cfg);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ofstream csv(fs::path(cfg.out_dir) / "scan.csv");
    csv << "c_re,c_im,status,verdict,failing_index,witness_start,log2_abs_D_N,"
           "abs_S_N,rp_class,rs_class\n";
    char buf[512];
    std::ofstream jsonl(fs::path(cfg.out_dir) / "scan.jsonl");
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%s,%d,%d,%.17g,%.17g,%s,%s\n",
                      row.c.real(), row.c.imag(), row.status.c_str(),
                      row.verdict.c_str(), row.failing_index, row.witness_start,
                      row.log2_abs_D_N, row.abs_S_N, row.rp_class.c_str(),
                      row.rs_class.c_str());
        csv << buf;
        ordered_json j{{"c", json_complex(row.c)},
                       {"status", row.status},
                       {"verdict", row.verdict},
                       {"failing_index", row.failing_index},
                       {"witness_start", row.witness_start},
                       {"log2_abs_D_N", row.log2_abs_D_N},
                       {"abs_S_N", row.abs_S_N},
                       {"rp_class", row.rp_class},
                       {"rs_class", row.rs_class}};
        jsonl << j.dump() << "\n";
    }
    std::ofstream ppm(fs::path(cfg.out_dir) / "plots" / "scan.ppm",
                      std::ios::binary);
    write_ppm(rows, res, ppm);
    return 0;
}

int run_verify(const std::string& suite, const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::vector<SuiteResult> results;
    if (suite == "oracle") {
        results.push_back(run_oracle_suite(cfg.seed, 100));
        results.push_back(run_duality_suite(cfg.seed + 1, 50));
    } else if (suite == "identities") {
        results.push_back(run_identities_suite(cfg.seed));
        results.push_back(run_residue_suite(cfg.seed + 2, 8));
    } else if (suite == "measures") {
        results.push_back(run_measures_suite(cfg.seed, 20));
        results.push_back(run_probe_controls_suite());
    } else {
        throw precondition_error("unknown suite: " + suite +
                                 " (expected oracle|identities|measures)");
    }
    ordered_json out = ordered_json::array();
    bool all = true;
    for (const auto& r : results) {
        out.push_back(r.to_json());
        all = all && r.passed();
        std::printf("[%s] %s: %d/%d passed (max error %.3g)\n",
                    r.passed() ? "PASS" : "FAIL", r.name.c_str(),
                    r.total - r.failed, r.total, r.max_error);
    }
    std::ofstream rf(fs::path(cfg.out_dir) / ("verify_" + suite + ".json"));
    rf << out.dump(2) << "\n";
    return all ? 0 : 4;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Transfer-operator actions, Ruelle-Poincare series, and "
                 "atomic-measure diagnostics for rational maps"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--map", cfg.map_file, "map specification JSON file");
        cmd->add_option("--quadratic-c", cfg.quadratic_c,
                        "parameter c of z^2+c as re,im");
        cmd->add_option("--n", cfg.n, "series length");
        cmd->add_option("--depth", cfg.depth, "resolvent depth cap");
        cmd->add_option("--probe-len", cfg.probe_len, "weak-* probe length");
        cmd->add_option("--out", cfg.out_dir, "output directory");
        cmd->add_option("--jobs", cfg.jobs,
                        "worker threads (default: RUELLE_LAB_JOBS or hardware)");
        cmd->add_option("--seed", cfg.seed, "seed for randomized checks");
        cmd->add_option("--thresholds", cfg.thresholds_file,
                        "JSON file overriding classification thresholds");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "full single-map analysis");
    add_common(analyze);
    CLI::App* scan =
        app.add_subcommand("scan", "quadratic parameter-plane scan");
    add_common(scan);
    scan->add_option("--grid", cfg.grid, "rectangle X0,Y0,X1,Y1")->required();
    scan->add_option("--res", cfg.res, "grid resolution per axis")->required();
    CLI::App* verify = app.add_subcommand("verify", "randomized property suites");
    add_common(verify);
    std::string suite;
    verify->add_option("suite", suite, "oracle | identities | measures")->required();

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        std::ostringstream oss;
        int code = app.exit(e, oss, oss);
        std::fputs(oss.str().c_str(), code == 0 ? stdout : stderr);
        return code == 0 ? 0 : 1;
    }

    try {
        load_thresholds(cfg);
        if (analyze->parsed()) return run_analyze(cfg);
        if (scan->parsed()) return run_scan(cfg);
        if (verify->parsed()) return run_verify(suite, cfg);
    } catch (const precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const hypothesis_error& e) {
        std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

}  // namespace ruelle
