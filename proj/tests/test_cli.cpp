#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "splinenas/cli.hpp"

using namespace splinenas;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
    fs::path dir;
    fs::path study;
    Sandbox() {
        std::string tmpl = (fs::temp_directory_path() / "splinenas-cli-XXXXXX").string();
        dir = mkdtemp(tmpl.data());
        study = dir / "study.json";
    }
    ~Sandbox() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
};

struct Result {
    int code;
    std::string out;
    std::string err;
    json record() const { return json::parse(out.substr(0, out.find('\n'))); }
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kUnitCube = R"({"dims":[{"name":"x","min":0,"max":1},{"name":"y","min":0,"max":1},{"name":"z","min":0,"max":1}]})";

}  // namespace

TEST_CASE("exit code mapping") {
    CHECK(cli::exit_code_for(ErrorKind::InvalidConfig) == cli::kUsage);
    CHECK(cli::exit_code_for(ErrorKind::PendingOutstanding) == cli::kStateViolation);
    CHECK(cli::exit_code_for(ErrorKind::NumericallyUnstable) == cli::kNumericFailure);
    CHECK(cli::exit_code_for(ErrorKind::EvalTimeout) == cli::kEvaluatorFailure);
    CHECK(cli::exit_code_for(ErrorKind::EvaluatorFailed) == cli::kEvaluatorFailure);
}

TEST_CASE("usage errors exit 2") {
    Sandbox sb;
    CHECK(invoke({}).code == cli::kUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
    CHECK(invoke({"init", "--study", sb.study.string(), "--fixture", "table9"}).code == cli::kUsage);
    CHECK(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string(), "--epsilon",
               "-1"})
              .code == cli::kUsage);
    CHECK(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string(), "--budget",
               "3"})
              .code == cli::kUsage);
    CHECK_FALSE(fs::exists(sb.study));
}

TEST_CASE("ask-tell session through the CLI") {
    Sandbox sb;
    const auto space = sb.write("space.json", kUnitCube);
    auto r = invoke({"init", "--study", sb.study.string(), "--space", space.string(), "--epsilon", "0.001", "--samples",
                  "1024", "--levels", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.record()["queue"].size() == 9);
    CHECK(r.out.find("initial design queue") != std::string::npos);

    for (int i = 0; i < 50; ++i) {
        r = invoke({"suggest", "--study", sb.study.string()});
        REQUIRE(r.code == 0);
        const auto x = r.record()["x"].get<std::vector<double>>();
        double y = 0;
        for (double v : x) y -= (v - 0.3) * (v - 0.3);
        std::ostringstream pt;
        pt.precision(17);
        pt << "x=" << x[0] << ",y=" << x[1] << ",z=" << x[2];
        std::ostringstream val;
        val.precision(17);
        val << y;
        r = invoke({"record", "--study", sb.study.string(), "--point", pt.str(), "--value", val.str()});
        REQUIRE(r.code == 0);
        if (r.record()["converged"].get<bool>()) break;
    }
    r = invoke({"status", "--study", sb.study.string()});
    CHECK(r.code == 0);
    CHECK(r.record()["phase"] == "converged");
    CHECK(invoke({"suggest", "--study", sb.study.string()}).code == cli::kStateViolation);
}

TEST_CASE("failing commands leave the study file byte-identical") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string()}).code == 0);
    const auto before = slurp(sb.study);
    CHECK(invoke({"record", "--study", sb.study.string(), "--point", "0.11,0.22,0.33", "--value", "1"}).code ==
          cli::kStateViolation);
    CHECK(invoke({"record", "--study", sb.study.string(), "--point", "0,0,0", "--value", "nan"}).code != 0);
    CHECK(invoke({"import", "--study", sb.study.string(), "--point", "2,0,0", "--value", "1"}).code ==
          cli::kStateViolation);
    CHECK(invoke({"predict", "--study", sb.study.string(), "--point", "0.5,0.5,0.5"}).code == cli::kNumericFailure);
    CHECK(invoke({"run", "--study", sb.study.string(), "--evaluator", "false"}).code == cli::kEvaluatorFailure);
    CHECK(invoke({"run", "--study", sb.study.string(), "--evaluator", "echo nope"}).code == cli::kEvaluatorFailure);
    CHECK(invoke({"project", "--study", sb.study.string(), "--free", "x,x", "--fixed", "z=0"}).code != 0);
    CHECK(slurp(sb.study) == before);
}

TEST_CASE("pending suggestion blocks a second suggest") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string()}).code == 0);
    REQUIRE(invoke({"suggest", "--study", sb.study.string()}).code == 0);
    const auto before = slurp(sb.study);
    CHECK(invoke({"suggest", "--study", sb.study.string()}).code == cli::kStateViolation);
    CHECK(slurp(sb.study) == before);
}

TEST_CASE("run with an external evaluator") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string(), "--budget",
                 "12", "--samples", "512", "--levels", "3"})
                .code == 0);
    const auto r = invoke({"run", "--study", sb.study.string(), "--evaluator",
                        "python3 -c \"import os; print(-sum((float(os.environ['SPLINENAS_'+k])-0.3)**2 for k in 'XYZ'))\""});
    CHECK(r.code == 0);
    const auto rec = r.record();
    CHECK(rec["points"].get<int>() >= 9);
    CHECK((rec["phase"] == "converged" || rec["phase"] == "budget-exhausted"));
}

TEST_CASE("run with a builtin benchmark") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string(), "--epsilon",
                 "0.001", "--samples", "2048", "--levels", "4"})
                .code == 0);
    const auto r = invoke({"run", "--study", sb.study.string(), "--benchmark", "sphere"});
    REQUIRE(r.code == 0);
    const auto top = r.record()["x_top"]["x"].get<std::vector<double>>();
    for (double v : top) CHECK(std::abs(v - 0.5) <= 0.05);
    CHECK(invoke({"run", "--study", sb.study.string(), "--benchmark", "nope"}).code != 0);
}

TEST_CASE("fixture commands: predict, project, import, extend") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--fixture", "table3_blresnext50"}).code == 0);

    auto r = invoke({"predict", "--study", sb.study.string(), "--point", "2,8,3"});
    REQUIRE(r.code == 0);
    CHECK(r.record()["extrapolated"] == true);
    CHECK(r.out.find("extrapolated") != std::string::npos);

    r = invoke({"predict", "--study", sb.study.string(), "--point", "alpha=2,beta=2,phi=2"});
    REQUIRE(r.code == 0);
    CHECK(r.record()["value"].get<double>() == doctest::Approx(40.96).epsilon(1e-9));

    const auto csv = sb.dir / "grid.csv";
    r = invoke({"project", "--study", sb.study.string(), "--free", "beta,phi", "--fixed", "alpha=2", "--resolution", "2",
             "--out", csv.string()});
    REQUIRE(r.code == 0);
    const auto grid = slurp(csv);
    CHECK(grid.rfind("beta\\phi,1,2\n", 0) == 0);
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 3);

    const auto wide = sb.write("wide.json",
                               R"({"dims":[{"name":"alpha","min":2,"max":8,"integer":true},)"
                               R"({"name":"beta","min":2,"max":8,"integer":true},{"name":"phi","min":1,"max":3}]})");
    r = invoke({"extend", "--study", sb.study.string(), "--space", wide.string()});
    REQUIRE(r.code == 0);
    CHECK(r.record()["phase"] == "initial-design");
    r = invoke({"import", "--study", sb.study.string(), "--point", "2,8,3", "--value", "41.64"});
    REQUIRE(r.code == 0);
    CHECK(r.record()["x_top"]["y"].get<double>() == 41.64);

    const auto rows = sb.write("rows.csv", "alpha,beta,phi,acc\n8,8,3,40.1\n");
    CHECK(invoke({"import", "--study", sb.study.string(), "--csv", rows.string()}).code == 0);
    const auto bad = sb.write("bad.csv", "a,b,c,acc\n8,8,3,40.1\n");
    CHECK(invoke({"import", "--study", sb.study.string(), "--csv", bad.string()}).code == cli::kUsage);
}

TEST_CASE("structured outputs are deterministic") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--fixture", "table1_resnet18"}).code == 0);
    const auto a = invoke({"predict", "--study", sb.study.string(), "--point", "80,208,475,736,2400"});
    const auto b = invoke({"predict", "--study", sb.study.string(), "--point", "80,208,475,736,2400"});
    CHECK(a.out == b.out);
    const auto copy = sb.dir / "copy.json";
    fs::copy_file(sb.study, copy);
    const auto s1 = invoke({"suggest", "--study", sb.study.string()});
    const auto s2 = invoke({"suggest", "--study", copy.string()});
    CHECK(s1.out == s2.out);
    CHECK(slurp(sb.study) == slurp(copy));
}

TEST_CASE("a held lock refuses a second writer") {
    Sandbox sb;
    REQUIRE(invoke({"init", "--study", sb.study.string(), "--space", sb.write("s.json", kUnitCube).string()}).code == 0);
    const auto lock = sb.study.string() + ".lock";
    // flock is per open file description, so a child process must hold it.
    if (std::system("command -v flock >/dev/null 2>&1") != 0) return;
    std::FILE* p = ::popen(("flock -n '" + lock + "' sleep 1.5").c_str(), "r");
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    CHECK(invoke({"suggest", "--study", sb.study.string()}).code == cli::kStateViolation);
    ::pclose(p);
    CHECK(invoke({"suggest", "--study", sb.study.string()}).code == 0);
}
