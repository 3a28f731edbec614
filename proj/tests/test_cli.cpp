// End-to-end runs of the critlab binary: exit codes, JSON artifacts, CSV
// shape, digest stability and the thread override.  The math behind each
// command is covered by the unit suites; this one checks the plumbing.

#include <doctest.h>

#include "critlab/map.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using nlohmann::json;

namespace {

struct CliRun {
    int status = -1;
    std::string out;  // stdout and stderr, merged
};

CliRun runCli(const std::string& args, const std::string& envPrefix = "") {
    const std::string cmd = envPrefix + CRITLAB_BIN + (" " + args) + " 2>&1";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int rc = pclose(pipe);
    if (WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
    return r;
}

std::string tmpPath(const std::string& name) { return std::string(CRITLAB_TMP) + "/" + name; }

std::string writeSpec(const std::string& name, const json& spec) {
    const std::string path = tmpPath(name);
    std::ofstream out(path);
    REQUIRE(out.good());
    out << spec.dump(2) << '\n';
    return path;
}

json parseJsonOut(const CliRun& r) {
    INFO("output was: " << r.out);
    REQUIRE(r.status == 0);
    return json::parse(r.out);
}

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

struct CsvFile {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvFile readCsv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    CsvFile csv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            csv.comments.push_back(line);
        } else if (csv.header.empty()) {
            csv.header = splitCsvLine(line);
        } else if (!line.empty()) {
            csv.rows.push_back(splitCsvLine(line));
        }
    }
    return csv;
}

json radialSpec(const std::string& profile, double value) {
    json params{{"profile", profile}};
    if (profile == "power") params["p"] = value;
    if (profile == "cubic") params["c"] = value;
    return json{{"family", "radial"}, {"n", 2}, {"params", params}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and argument errors use the documented exit codes") {
    const CliRun help = runCli("--help");
    CHECK(help.status == 0);
    CHECK(help.out.find("classify") != std::string::npos);
    CHECK(help.out.find("energy") != std::string::npos);

    CHECK(runCli("").status == 2);  // a subcommand is required
    CHECK(runCli("classify --n 2 --q 3 --a 1").status == 2);  // --d missing
    CHECK(runCli("classify --n 2 --q 3 --a 1 --d 1 --bogus 7").status == 2);
    CHECK(runCli("frobnicate --n 2").status == 2);
}

TEST_CASE("classify reports exponents, verdicts and the manifest") {
    const json j = parseJsonOut(runCli("classify --n 2 --q 3 --a 1 --d 1"));
    CHECK(j["beta"].get<double>() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(j["seriesExpD2"].get<double>() == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    CHECK(j["seriesExpJac"].get<double>() == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    CHECK(!j.contains("b"));  // q = 3 lies above the b window for n = 2
    CHECK(j["hkApplies"].get<bool>() == false);
    CHECK(j["mainApplies"].get<bool>() == false);
    CHECK(j["criticalSetNull"].get<bool>() == false);
    CHECK(j["counterexampleExists"].get<bool>() == true);
    CHECK(j["manifest"]["argv"][1].get<std::string>() == "classify");
    CHECK(j["manifest"]["artifactVersion"].get<std::string>() == "critlab/1.0.0");

    // Inside the b window, and exactly on the null-criterion boundary.
    const json k = parseJsonOut(runCli("classify --n 2 --q 1.5 --a 6 --d 1"));
    CHECK(k["b"].get<double>() == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(k["criticalSetNull"].get<bool>() == true);
    CHECK(k["counterexampleExists"].get<bool>() == false);
}

TEST_CASE("invalid regime parameters exit with the precondition code") {
    const CliRun low = runCli("classify --n 1 --q 3 --a 1 --d 0.5");
    CHECK(low.status == 2);
    CHECK(low.out.find("n >= 2") != std::string::npos);
    CHECK(runCli("classify --n 2 --q 3 --a 1 --d 3").status == 2);
    CHECK(runCli("classify --n 2 --q 0.5 --a 1 --d 1").status == 2);
}

TEST_CASE("eval matches the library closed forms through a spec file") {
    const std::string path = writeSpec("cli_cubic.json", radialSpec("cubic", 0.3));
    const json j = parseJsonOut(runCli("eval --map " + path + " --point 0.5,0.25"));

    const auto f = critlab::loadMap(path);
    const critlab::Vec x{0.5, 0.25};
    const critlab::Vec y = f->value(x);
    CHECK(j["family"].get<std::string>() == "radial");
    REQUIRE(j["value"].size() == 2);
    CHECK(j["value"][0].get<double>() == doctest::Approx(y[0]).epsilon(1e-15));
    CHECK(j["value"][1].get<double>() == doctest::Approx(y[1]).epsilon(1e-15));
    CHECK(j["jac"].get<double>() == doctest::Approx(f->jac(x)).epsilon(1e-15));
    CHECK(j["d2Norm"].get<double>() == doctest::Approx(f->d2Norm(x)).epsilon(1e-15));
    CHECK(j["loci"].get<std::string>() == f->lociDescription());
    CHECK(j["manifest"]["mapDigest"].get<std::string>() ==
          critlab::specDigest(f->spec()));
}

TEST_CASE("eval rejects bad points with the precondition code") {
    const std::string path = writeSpec("cli_cubic2.json", radialSpec("cubic", 0.3));
    const CliRun outside = runCli("eval --map " + path + " --point 2,0");
    CHECK(outside.status == 2);
    CHECK(outside.out.find("outside") != std::string::npos);
    CHECK(runCli("eval --map " + path + " --point 0.1,0.2,0.3").status == 2);
    CHECK(runCli("eval --map " + tmpPath("missing.json") + " --point 0,0").status == 2);
}

TEST_CASE("energy on a flat profile converges and embeds its manifest") {
    const std::string path = writeSpec("cli_flat.json", radialSpec("power", 1.0));
    const std::string outPath = tmpPath("cli_flat_energy.json");
    const CliRun r =
        runCli("energy --map " + path + " --q 2 --a 1 --tol 1e-6 --out " + outPath);
    const json j = parseJsonOut(r);
    CHECK(j["converged"].get<bool>() == true);
    CHECK(j["d2Integral"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j["jacNegIntegral"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(j["manifest"]["tolerances"]["psi"].get<std::string>() == "maxentry");

    std::ifstream saved(outPath);
    REQUIRE(saved.good());
    json jf;
    saved >> jf;
    CHECK(jf == j);  // the artifact file is the same document as stdout
}

TEST_CASE("a divergent energy run exits with the budget code") {
    const std::string path = writeSpec("cli_pow2.json", radialSpec("power", 2.0));
    const CliRun r = runCli("energy --map " + path + " --q 2 --a 1 --max-cells 4000");
    CHECK(r.status == 3);
    const json j = json::parse(r.out);
    CHECK(j["converged"].get<bool>() == false);
    CHECK(j["cellsUsed"].get<long>() >= 3000);
}

TEST_CASE("energy on a squeeze map defaults to the generation series") {
    const std::string spec = tmpPath("cli_cantor_energy.json");
    REQUIRE(runCli("cantor build --n 2 --q 3 --a 1 --d 1 --maxgen 3 --out " + spec)
                .status == 0);

    const std::string csvPath = tmpPath("cli_cantor_series.csv");
    const CliRun r = runCli("energy --map " + spec + " --q 3 --a 1 --tol 1e-3" +
                            " --series-csv " + csvPath);
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["converged"].get<bool>() == true);
    REQUIRE(j["perGeneration"].size() == 3);
    for (const auto& row : j["perGeneration"]) {
        CHECK(row["numericD2"].get<double>() > 0.0);
        CHECK(row["numericJac"].get<double>() > 0.0);
    }
    CHECK(readCsv(csvPath).rows.size() == 3);

    // --full forces whole-domain refinement, which a tiny budget cannot finish.
    const CliRun fullRun =
        runCli("energy --map " + spec + " --q 3 --a 1 --full --max-cells 2000");
    CHECK(fullRun.status == 3);
    CHECK_FALSE(json::parse(fullRun.out).contains("perGeneration"));
}

TEST_CASE("sweep writes regime rows with manifest comments") {
    const std::string outPath = tmpPath("cli_sweep.csv");
    const CliRun r =
        runCli("sweep --n 2 --q 1.5:3.0:0.75 --a 1 --d 1 --out " + outPath);
    REQUIRE(r.status == 0);
    CHECK(r.out.find("wrote 3 rows") != std::string::npos);

    const CsvFile csv = readCsv(outPath);
    REQUIRE(!csv.comments.empty());
    CHECK(csv.comments.front().rfind("# argv:", 0) == 0);
    REQUIRE(csv.header.size() == 11);
    CHECK(csv.header[0] == "n");
    CHECK(csv.header[4] == "b");
    CHECK(csv.header[10] == "counterex");
    REQUIRE(csv.rows.size() == 3);
    // q = 1.5 sits inside the b window; 2.25 and 3.0 leave the cell empty.
    CHECK(std::stod(csv.rows[0][4]) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(csv.rows[1][4].empty());
    CHECK(csv.rows[2][4].empty());
    for (const auto& row : csv.rows) REQUIRE(row.size() == 11);
}

TEST_CASE("malformed ranges, points and boxes are rejected") {
    CHECK(runCli("sweep --n 2 --q 1:2 --a 1 --d 1 --out " + tmpPath("x.csv")).status == 2);
    CHECK(runCli("sweep --n 2 --q 3:1:0.5 --a 1 --d 1 --out " + tmpPath("x.csv")).status == 2);
    const std::string path = writeSpec("cli_cubic3.json", radialSpec("cubic", 0.3));
    const CliRun box = runCli("verify mollify --map " + path +
                              " --radius 0.05 --res 8 --g 0,0,1");
    CHECK(box.status == 2);
    CHECK(box.out.find("box") != std::string::npos);
}

TEST_CASE("squeeze schedules rebuild to the same digest") {
    const std::string p1 = tmpPath("cli_cantor1.json");
    const std::string p2 = tmpPath("cli_cantor2.json");
    const std::string args = "cantor build --n 2 --q 3 --a 1 --d 1 --maxgen 4 --out ";
    const json a = parseJsonOut(runCli(args + p1));
    const json b = parseJsonOut(runCli(args + p2));
    CHECK(a["digest"].get<std::string>() == b["digest"].get<std::string>());
    CHECK(a["beta"].get<double>() == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(a["glueExact"].get<bool>() == true);  // 2^{-n/d} = 1/4 <= 3/10
    CHECK(a["regime"]["counterexampleExists"].get<bool>() == true);

    const auto f = critlab::loadMap(p1);
    CHECK(f->family() == "cantor");
    CHECK(critlab::specDigest(f->spec()) == a["digest"].get<std::string>());
}

TEST_CASE("cantor eval and cells expose the descent structure") {
    const std::string spec = tmpPath("cli_cantor_map.json");
    REQUIRE(runCli("cantor build --n 2 --q 3 --a 1 --d 1 --maxgen 3 --out " + spec)
                .status == 0);

    const json j = parseJsonOut(runCli("cantor eval --map " + spec + " --point 0.2,0.2"));
    CHECK(j["level"].get<int>() >= 0);
    CHECK(j["cellCenter"].size() == 2);
    CHECK(std::isfinite(j["jac"].get<double>()));

    const std::string cellsPath = tmpPath("cli_cells.csv");
    REQUIRE(runCli("cantor cells --map " + spec + " --gen 2 --out " + cellsPath)
                .status == 0);
    const CsvFile csv = readCsv(cellsPath);
    REQUIRE(csv.header.size() == 8);
    CHECK(csv.header[0] == "gen");
    CHECK(csv.header[1] == "word");
    CHECK(csv.rows.size() == 16);  // (2^n)^2 cells at generation 2
    CHECK(csv.rows[0][0] == "2");

    const std::string radial = writeSpec("cli_cubic4.json", radialSpec("cubic", 0.3));
    const CliRun wrong = runCli("cantor eval --map " + radial + " --point 0,0");
    CHECK(wrong.status == 2);
    CHECK(wrong.out.find("squeeze") != std::string::npos);
}

TEST_CASE("the thread environment variable overrides the flag") {
    const std::string path = writeSpec("cli_flat2.json", radialSpec("power", 1.0));
    const json j = parseJsonOut(
        runCli("energy --map " + path + " --q 2 --a 1 --threads 1", "CRITLAB_THREADS=3 "));
    CHECK(j["manifest"]["threads"].get<int>() == 3);
}

TEST_CASE("dimension emits the slope and a per-scale table") {
    const json spec{{"family", "folding"},
                    {"n", 2},
                    {"params", {{"q", 2.0}, {"a", 1.0}, {"alpha", 1.6}}}};
    const std::string path = writeSpec("cli_fold.json", spec);
    const std::string csvPath = tmpPath("cli_dim.csv");
    const json j =
        parseJsonOut(runCli("dimension --map " + path + " --depth 7 --out " + csvPath));
    CHECK(j["degenerate"].get<bool>() == false);
    CHECK(j["targetD"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j["slope"].get<double>() > 0.6);
    CHECK(j["slope"].get<double>() < 1.4);
    CHECK(j["epsilonRule"].get<std::string>().find("alpha") != std::string::npos);

    const CsvFile csv = readCsv(csvPath);
    REQUIRE(csv.header.size() == 4);
    CHECK(csv.header[0] == "scale");
    CHECK(csv.header[3] == "runningSlope");
    CHECK(csv.rows.size() == 4);
    CHECK(!csv.rows[1][1].empty());   // eps column is populated
    CHECK(!csv.rows[1][3].empty());   // running slope from the second row on
    bool sawRule = false;
    for (const auto& line : csv.comments)
        if (line.find("epsilonRule") != std::string::npos) sawRule = true;
    CHECK(sawRule);
}

TEST_CASE("verify scans run end to end from spec files") {
    const json foldSpec{{"family", "folding"},
                        {"n", 2},
                        {"params", {{"q", 2.0}, {"a", 1.0}, {"alpha", 1.6}}}};
    const std::string fold = writeSpec("cli_fold2.json", foldSpec);

    const json inj = parseJsonOut(runCli("verify injectivity --map " + fold + " --res 48"));
    CHECK(inj["verdict"].get<std::string>() == "collision-found");
    CHECK(!inj["collisions"].empty());
    CHECK(inj["manifest"]["fittedConstants"]["sigmaMin"].get<double>() > 0.0);

    const json sg = parseJsonOut(runCli("verify signs --map " + fold + " --res 64"));
    CHECK(sg["negFraction"].get<double>() > 0.02);
    CHECK(sg["posFraction"].get<double>() > 0.5);

    const std::string pow = writeSpec("cli_pow2b.json", radialSpec("power", 2.0));
    const json dis =
        parseJsonOut(runCli("verify distortion --map " + pow + " --point 0.5,0"));
    CHECK(dis["distortion"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    const std::string cubic = writeSpec("cli_cubic5.json", radialSpec("cubic", 0.3));
    const json deg1 = parseJsonOut(runCli("verify degree --map " + cubic + " --y 0,0"));
    CHECK(deg1["degree"].get<int>() == 1);
    const json deg0 = parseJsonOut(runCli("verify degree --map " + cubic + " --y 3,3"));
    CHECK(deg0["degree"].get<int>() == 0);
}

TEST_CASE("mollify smooths a smooth map through the CLI") {
    const std::string cubic = writeSpec("cli_cubic6.json", radialSpec("cubic", 0.3));
    const json j = parseJsonOut(runCli("verify mollify --map " + cubic +
                                       " --radius 0.05 --delta 0.05 --res 12" +
                                       " --g -0.4,-0.4,0.4,0.4"));
    CHECK(j["minJac"].get<double>() > 0.8);
    CHECK(j["injective"].get<bool>() == true);
    CHECK(j["kernelRadius"].get<double>() == doctest::Approx(0.05).epsilon(1e-15));
}

}  // TEST_SUITE
