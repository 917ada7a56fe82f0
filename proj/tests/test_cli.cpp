#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "test_helpers.hpp"

using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/wdistill_test_" +
           name;
}

CliResult run_cli(const std::string& args, const std::string& stdin_text = "",
                  const std::string& extra_env = "") {
    const std::string in = temp_path("in.json");
    const std::string out = temp_path("out.txt");
    const std::string err = temp_path("err.txt");
    {
        std::ofstream f(in);
        f << stdin_text;
    }
    const std::string cmd = extra_env + " " + std::string(WDISTILL_CLI_PATH) + " " + args + " < " +
                            in + " > " + out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string w_doc() {
    return R"({"amps": [[0,0],[0.5773502691896258,0],[0.5773502691896258,0],[0,0],[0.5773502691896258,0],[0,0],[0,0],[0,0]], "label": "symmetric W"})";
}

std::string ghz_doc() {
    return R"({"amps": [[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.7071067811865476,0]]})";
}

std::string asym_target_doc() {
    // (1/sqrt2)|000> + (1/2)|101> + (1/2)|110>
    return R"({"amps": [[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0.5,0],[0.5,0],[0,0]]})";
}

}  // namespace

TEST_CASE("canonicalize: symmetric W yields one form, GHZ two") {
    const CliResult w = run_cli("canonicalize", w_doc());
    REQUIRE(w.exit_code == 0);
    const json jw = json::parse(w.out);
    REQUIRE(jw["forms"].size() == 1);
    const auto lam = jw["forms"][0]["lambda"];
    const double r3 = 1.0 / std::sqrt(3.0);
    CHECK(lam[0].get<double>() == doctest::Approx(r3).epsilon(1e-12));
    CHECK(lam[1].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lam[2].get<double>() == doctest::Approx(r3).epsilon(1e-12));
    CHECK(lam[3].get<double>() == doctest::Approx(r3).epsilon(1e-12));
    CHECK(lam[4].get<double>() == 0.0);

    const CliResult g = run_cli("canonicalize", ghz_doc());
    REQUIRE(g.exit_code == 0);
    CHECK(json::parse(g.out)["forms"].size() == 2);
}

TEST_CASE("canonicalize: schema and degenerate exit codes") {
    CHECK(run_cli("canonicalize", R"({"amps": [[1,0],[0,0]]})").exit_code == 2);
    CHECK(run_cli("canonicalize", "not json").exit_code == 2);
    CHECK(run_cli("canonicalize",
                  R"({"amps": [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]})")
              .exit_code == 3);
    // product state: canonical reduction degenerates
    CHECK(run_cli("canonicalize",
                  R"({"amps": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]})")
              .exit_code == 3);
}

TEST_CASE("classify: classes, ranks, tangle") {
    const CliResult w = run_cli("classify", w_doc());
    REQUIRE(w.exit_code == 0);
    const json jw = json::parse(w.out);
    CHECK(jw["class"] == "W");
    CHECK(jw["ranks"] == json::array({2, 2, 2}));
    CHECK(jw["tangle"].get<double>() <= 1e-8);

    const json jg = json::parse(run_cli("classify", ghz_doc()).out);
    CHECK(jg["class"] == "GHZ");
    CHECK(jg["tangle"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));

    const json jp = json::parse(
        run_cli("classify", R"({"amps": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]})").out);
    CHECK(jp["class"] == "Product");
    CHECK(jp["ranks"] == json::array({1, 1, 1}));
}

TEST_CASE("distill: resource example, self-distillation, class precondition") {
    const CliResult r = run_cli("distill --target asym", w_doc());
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["p_star"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(j["target"] == "asym");
    CHECK(j["validation"]["prob_error"].get<double>() < 1e-9);
    CHECK(j["validation"]["target_error"].get<double>() < 1e-9);
    CHECK(j["povms"]["B"] == json::parse("[[1, 0], [0, 1]]"));

    const json self = json::parse(run_cli("distill --target asym", asym_target_doc()).out);
    CHECK(self["p_star"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));

    CHECK(run_cli("distill --target asym", ghz_doc()).exit_code == 4);
    CHECK(run_cli("distill --target bogus", w_doc()).exit_code == 2);
}

TEST_CASE("curve: sample count, endpoint maximum, 12-digit round trip") {
    const CliResult r = run_cli("curve --target asym --samples 2", w_doc());
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header, row1, row2, extra;
    REQUIRE(static_cast<bool>(std::getline(lines, header)));
    CHECK(header == "y,p");
    REQUIRE(static_cast<bool>(std::getline(lines, row1)));
    REQUIRE(static_cast<bool>(std::getline(lines, row2)));
    CHECK_FALSE(static_cast<bool>(std::getline(lines, extra)));
    CHECK(row1.substr(0, 4) == "0.5,");
    CHECK(row2.substr(0, 2) == "1,");

    // reparse and compare against the library to 12 significant digits
    const double r3 = 1.0 / std::sqrt(3.0);
    const auto lam = wdistill::w_form_from_lambda({r3, 0, r3, r3});
    const auto curve = wdistill::sample_curve(lam, wdistill::TargetKind::Asymmetric, 2);
    const double p1 = std::stod(row1.substr(4));
    const double p2 = std::stod(row2.substr(2));
    CHECK(p1 == doctest::Approx(curve.samples[0].second).epsilon(1e-12));
    CHECK(p2 == doctest::Approx(curve.samples[1].second).epsilon(1e-12));
}

TEST_CASE("verify: oracle agreement and byte-identical reruns") {
    const std::string args = "verify --target asym --restarts 150 --seed 31415";
    const CliResult a = run_cli(args, w_doc());
    REQUIRE(a.exit_code == 0);
    const json j = json::parse(a.out);
    CHECK(j["p_closed"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(j["gap"].get<double>() <= 1e-6);
    CHECK(j["seed"] == 31415);

    const CliResult b = run_cli(args, w_doc());
    CHECK(a.out == b.out);
}

TEST_CASE("split-test: counts are consistent and genuine violations are reported") {
    // On the symmetric W state some two-outcome splits followed by per-branch
    // filtering beat the one-branch optimum; the summary must report them
    // rather than hide them.
    const CliResult r = run_cli("split-test --target asym --trials 20 --seed 7", w_doc());
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["trials"] == 20);
    CHECK(j["holds"].get<int>() + j["violations"].get<int>() == 20);
    CHECK(j["violations"].get<int>() >= 1);
    CHECK(j["max_excess"].get<double>() > 1e-8);

    const CliResult again = run_cli("split-test --target asym --trials 20 --seed 7", w_doc());
    CHECK(again.out == r.out);
}

TEST_CASE("strict seed mode requires --seed for randomized commands") {
    CHECK(run_cli("verify --target asym --restarts 10", w_doc(), "WDISTILL_REQUIRE_SEED=1")
              .exit_code == 2);
    CHECK(run_cli("verify --target asym --restarts 10 --seed 5", w_doc(),
                  "WDISTILL_REQUIRE_SEED=1")
              .exit_code == 0);
    CHECK(run_cli("split-test --trials 2", w_doc(), "WDISTILL_REQUIRE_SEED=1").exit_code == 2);
    // deterministic commands do not need a seed
    CHECK(run_cli("classify", w_doc(), "WDISTILL_REQUIRE_SEED=1").exit_code == 0);
}

TEST_CASE("file input and --out behave like stdin/stdout") {
    const std::string in_path = temp_path("state_file.json");
    const std::string out_path = temp_path("classify_out.json");
    {
        std::ofstream f(in_path);
        f << w_doc();
    }
    const CliResult r = run_cli("classify " + in_path + " --out " + out_path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(json::parse(slurp(out_path))["class"] == "W");
}
