#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ruelle/cli_app.hpp"
#include "ruelle/report_json.hpp"

namespace fs = std::filesystem;
using namespace ruelle;

namespace {

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"ruelle-lab"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("analyze emits a certificate for c = -2") {
    TempDir dir("ruelle_cli_analyze");
    int code = run_cli({"analyze", "--quadratic-c=-2,0", "--n=64",
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 0);
    REQUIRE(fs::exists(dir.path / "report.json"));
    ordered_json rep = ordered_json::parse(slurp(dir.path / "report.json"));
    CHECK(rep["report"]["quadratic_criterion"]["verdict"] ==
          "condition-1-satisfied");
    CHECK(rep["report"]["overall"].get<std::string>().rfind("certificate", 0) == 0);
    CHECK(fs::exists(dir.path / "traces" / "rp.csv"));
    CHECK(fs::exists(dir.path / "traces" / "s.csv"));
    CHECK(fs::exists(dir.path / "measures.jsonl"));
    // measures stream parses line by line
    std::ifstream ms(dir.path / "measures.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(ms, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        CHECK(j.contains("loc"));
        CHECK(j.contains("w_log2abs"));
        ++lines;
    }
    CHECK(lines > 0);
}

TEST_CASE("analyze is deterministic byte for byte") {
    TempDir da("ruelle_cli_det_a");
    TempDir db("ruelle_cli_det_b");
    for (const TempDir* d : {&da, &db}) {
        int code = run_cli({"analyze", "--quadratic-c=-0.4,0.3", "--n=32",
                            "--seed=4", ("--out=" + d->str()).c_str()});
        CHECK(code == 0);
    }
    // the embedded config differs in out_dir; every result payload must match
    ordered_json ja = ordered_json::parse(slurp(da.path / "report.json"));
    ordered_json jb = ordered_json::parse(slurp(db.path / "report.json"));
    CHECK(ja["report"].dump() == jb["report"].dump());
    CHECK(slurp(da.path / "measures.jsonl") == slurp(db.path / "measures.jsonl"));
    CHECK(slurp(da.path / "traces" / "rp.csv") ==
          slurp(db.path / "traces" / "rp.csv"));
}

TEST_CASE("analyze flags the degenerate parameter with exit 3") {
    TempDir dir("ruelle_cli_degenerate");
    int code = run_cli({"analyze", "--quadratic-c=0,0", "--n=64",
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 3);
    ordered_json rep = ordered_json::parse(slurp(dir.path / "report.json"));
    CHECK(rep["report"]["overall"] == "degenerate");
}

TEST_CASE("missing map file fails with exit 1") {
    TempDir dir("ruelle_cli_missing");
    int code = run_cli({"analyze", "--map=does_not_exist.json",
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 1);
}

TEST_CASE("hypothesis violation exits with 2") {
    TempDir dir("ruelle_cli_hyp");
    fs::path mapfile = dir.path / "cube.json";
    {
        std::ofstream out(mapfile);
        // z^3: non-simple critical point
        out << R"({"numerator": [[0,0],[0,0],[0,0],[1,0]], "denominator": [[1,0]]})";
    }
    int code = run_cli({"analyze", ("--map=" + mapfile.string()).c_str(),
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 2);
}

TEST_CASE("critical relation is reported as a hypothesis violation") {
    TempDir dir("ruelle_cli_rel");
    fs::path mapfile = dir.path / "rel.json";
    {
        std::ofstream out(mapfile);
        // z^3 - 3z - 4: R(1) = R^2(-1)
        out << R"({"numerator": [[-4,0],[-3,0],[0,0],[1,0]],)"
            << R"( "denominator": [[1,0]]})";
    }
    int code = run_cli({"analyze", ("--map=" + mapfile.string()).c_str(), "--n=16",
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 2);
    ordered_json rep = ordered_json::parse(slurp(dir.path / "report.json"));
    CHECK(rep["report"]["overall"] == "hypotheses-violated");
    CHECK(rep["report"]["hypotheses"]["no_critical_relations"] == false);
}

TEST_CASE("scan grid is deterministic and carries the fixture verdict") {
    TempDir dir_a("ruelle_cli_scan_a");
    TempDir dir_b("ruelle_cli_scan_b");
    for (const TempDir* d : {&dir_a, &dir_b}) {
        int code = run_cli({"scan", "--grid=-2.1,-0.1,-1.9,0.1", "--res=3",
                            "--n=48", "--seed=5", "--jobs=2",
                            ("--out=" + d->str()).c_str()});
        CHECK(code == 0);
    }
    std::string csv_a = slurp(dir_a.path / "scan.csv");
    std::string csv_b = slurp(dir_b.path / "scan.csv");
    CHECK(csv_a == csv_b);
    CHECK(std::count(csv_a.begin(), csv_a.end(), '\n') == 10);  // header + 9 rows
    // the middle cell is c = -2
    bool fixture_row = false;
    std::istringstream is(csv_a);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("-2,0,ok,condition-1-satisfied", 0) == 0) fixture_row = true;
    }
    CHECK(fixture_row);
    REQUIRE(fs::exists(dir_a.path / "plots" / "scan.ppm"));
    std::string ppm = slurp(dir_a.path / "plots" / "scan.ppm");
    CHECK(ppm.rfind("P6\n", 0) == 0);
    CHECK(ppm.find("verdict colors") != std::string::npos);
}

TEST_CASE("scan rejects a zero resolution") {
    TempDir dir("ruelle_cli_res0");
    int code = run_cli({"scan", "--grid=0,0,1,1", "--res=0",
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 1);
}

TEST_CASE("verify subcommand runs the measures suite") {
    TempDir dir("ruelle_cli_verify");
    int code = run_cli({"verify", "measures", "--seed=3",
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 0);
    CHECK(fs::exists(dir.path / "verify_measures.json"));
}

TEST_CASE("unknown verify suite fails cleanly") {
    TempDir dir("ruelle_cli_badsuite");
    int code = run_cli({"verify", "bogus", ("--out=" + dir.str()).c_str()});
    CHECK(code == 1);
}

TEST_CASE("thresholds file overrides classification knobs") {
    TempDir dir("ruelle_cli_thresholds");
    fs::path tf = dir.path / "thresholds.json";
    {
        std::ofstream out(tf);
        out << R"({"tb_s_floor": 1e-2, "ce_point": [0.31, 0.05]})";
    }
    int code = run_cli({"analyze", "--quadratic-c=-2,0", "--n=48",
                        ("--thresholds=" + tf.string()).c_str(),
                        ("--out=" + dir.str()).c_str()});
    CHECK(code == 0);
    ordered_json rep = ordered_json::parse(slurp(dir.path / "report.json"));
    CHECK(rep["config"]["thresholds"]["tb_s_floor"].get<double>() == 1e-2);
    CHECK(rep["config"]["thresholds"]["ce_point"][0].get<double>() == 0.31);
}
