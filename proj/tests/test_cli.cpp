#include "qopt/commands.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace qopt;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QOPT_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
}

RunConfig config_for(const std::string& preset) {
    RunConfig cfg;
    cfg.model_spec = preset;
    cfg.model = preset_model(preset);
    return cfg;
}

}  // namespace

TEST_CASE("tail rows for a one dimensional model", "[cli]") {
    RunConfig cfg;
    cfg.model = BoundModel::weighted_linear(std::vector<double>{1.0});
    cfg.Ms = {1, 2, 3};
    const auto t = cmd_tail(cfg);
    REQUIRE(t.rows().size() == 3);
    const auto exact = column(t.columns(), "exact");
    for (std::size_t i = 0; i < 3; ++i) {
        const double expected = std::exp(-(i + 1.0)) / (1.0 - std::exp(-1.0));
        CHECK(std::get<double>(t.rows()[i][exact]) == Catch::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("tail table never carries non-finite cells", "[cli]") {
    auto cfg = config_for("P2");
    cfg.levels = {{0, 40}};
    std::ostringstream os;
    cmd_tail(cfg).write_csv(os);
    const auto rows = parse_csv(os.str());
    REQUIRE(rows.size() == 42);
    const auto& header = rows.front();
    const auto reason = column(header, "reason");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == header.size());
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == reason || header[c] == "J") continue;
            const auto& cell = rows[r][c];
            if (cell.empty()) {
                CHECK(rows[r][reason].find(header[c] + "=") != std::string::npos);
                continue;
            }
            const double v = std::stod(cell);
            CHECK(std::isfinite(v));
            if (header[c] != "exact" && header[c] != "exact_abs_error") CHECK(v > 0.0);
        }
    }
}

TEST_CASE("isotropic model adds the comparison columns", "[cli]") {
    auto cfg = config_for("P3");
    cfg.levels = {{0, 6}};
    const auto t = cmd_tail(cfg);
    const auto cx = column(t.columns(), "complex");
    column(t.columns(), "iso_optim");
    column(t.columns(), "iso_stechkin_p0.5");
    for (const auto& row : t.rows()) CHECK(std::holds_alternative<double>(row[cx]));
    const auto aniso = cmd_tail(config_for("P2")).columns();
    CHECK(std::find(aniso.begin(), aniso.end(), "complex") == aniso.end());
}

TEST_CASE("estimates carry the prefactor", "[cli]") {
    auto cfg = config_for("P1");
    cfg.levels = {{2, 4}};
    auto scaled = cfg;
    scaled.model = cfg.model->with_prefactor(3.0);
    const auto a = cmd_tail(cfg), b = cmd_tail(scaled);
    for (const char* name : {"exact", "upper_eps0.3", "lower", "stechkin_p0.5"}) {
        const auto c = column(a.columns(), name);
        for (std::size_t r = 0; r < a.rows().size(); ++r)
            CHECK(std::get<double>(b.rows()[r][c]) == Catch::Approx(3.0 * std::get<double>(a.rows()[r][c])).epsilon(1e-13));
    }
}

TEST_CASE("mincard rows", "[cli]") {
    const auto t = cmd_mincard(config_for("P1"));
    REQUIRE(t.rows().size() == 3);
    const auto d = column(t.columns(), "Delta_eps");
    std::int64_t prev = std::numeric_limits<std::int64_t>::max();
    for (const auto& row : t.rows()) {
        const auto v = std::get<std::int64_t>(row[d]);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("sumjn rows", "[cli]") {
    RunConfig cfg;
    const auto t = cmd_sumjn(cfg);
    REQUIRE(t.rows().size() == 40);
    const auto pre = column(t.columns(), "preasym_bound");
    const auto asym = column(t.columns(), "asym_bound");
    CHECK(std::get<double>(t.rows()[0][pre]) == polylog_neg(20, std::exp(-1.0)));
    CHECK(std::holds_alternative<std::monostate>(t.rows()[0][asym]));
    CHECK(std::holds_alternative<double>(t.rows()[39][asym]));
    CHECK(std::holds_alternative<std::monostate>(t.rows()[39][pre]));
}

TEST_CASE("sumjn exponent follows the model unless given", "[cli]") {
    auto cfg = config_for("P3");
    const auto t = cmd_sumjn(cfg);
    CHECK(std::get<double>(t.rows()[0][1]) == sum_jN_exact(1, 8));
    cfg.dim = 3;
    CHECK(std::get<double>(cmd_sumjn(cfg).rows()[0][1]) == sum_jN_exact(1, 3));
    const auto r = run_cli("sumjn --model P3 --dim 2 --levels 4..4");
    CHECK(r.status == 0);
    CHECK(r.out.find("4,") != std::string::npos);
}

TEST_CASE("csv output is byte identical across thread counts", "[cli]") {
    const auto a = run_cli("tail --model P2 --threads 1");
    const auto b = run_cli("tail --model P2 --threads 8");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    const auto c = run_cli("tail --model P5 --levels 0..6 --threads 1");
    const auto d = run_cli("tail --model P5 --levels 0..6 --threads 8");
    CHECK(c.status == 0);
    CHECK(c.out == d.out);
}

TEST_CASE("sidecar records the configuration", "[cli]") {
    const auto dir = std::filesystem::temp_directory_path() / "qopt_cli_test";
    std::filesystem::create_directories(dir);
    const auto out = (dir / "p2.csv").string();
    const auto r = run_cli("tail --model P2 --levels 0..5 --eps 0.5,2 --out " + out);
    REQUIRE(r.status == 0);
    std::ifstream side(out + ".json");
    REQUIRE(side.good());
    const auto doc = nlohmann::json::parse(side);
    CHECK(doc["command"] == "tail");
    CHECK(doc["levels"][1] == 5);
    CHECK(doc["eps"].size() == 2);
    CHECK(doc["model"]["family"] == "WeightedLinear");
    std::ifstream csv(out);
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("upper_eps0.5") != std::string::npos);
}

TEST_CASE("json format", "[cli]") {
    const auto r = run_cli("mincard --model P2 --format json");
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc.size() == 3);
    CHECK(doc[0]["Delta_eps"] == 65);
}

TEST_CASE("exit codes", "[cli]") {
    CHECK(run_cli("tail --model P9").status == 2);
    CHECK(run_cli("tail --model P2 --levels 5..2").status == 2);
    CHECK(run_cli("tail --model P2 --bogus").status == 2);
    CHECK(run_cli("tail --model P2 --p 1.5").status == 2);
    CHECK(run_cli("volume --model P5 --method analytic_simplex").status == 3);
    CHECK(run_cli("mincard --model P2 --inject-period 1").status == 5);
    CHECK(run_cli("ehrhart --model P2").status == 0);
}

TEST_CASE("check passes on presets and fails on a bad period", "[cli]") {
    const auto ok = run_cli("check");
    CHECK(ok.status == 0);
    const auto doc = nlohmann::json::parse(ok.out);
    CHECK(doc["status"] == "ok");
    CHECK(doc["models"].size() == 6);
    const auto bad = run_cli("check --model P2 --inject-period 1");
    CHECK(bad.status == 5);
    CHECK(nlohmann::json::parse(bad.out)["status"] == "consistency_failure");
}

TEST_CASE("check reports oracle mismatches", "[cli]") {
    const auto small = run_cli("check --model P2 --oracle-box 3");
    CHECK(small.status == 5);
    CHECK(nlohmann::json::parse(small.out)["error"].get<std::string>().find("box oracle") != std::string::npos);
    CHECK(run_cli("check --model P2 --oracle-box 60").status == 0);
}
