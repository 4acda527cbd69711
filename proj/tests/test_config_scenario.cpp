#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "ksmix/config.hpp"
#include "ksmix/errors.hpp"
#include "ksmix/scenario.hpp"

using namespace ksmix;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMinimal = R"({"d":2,"n":64,"alpha":1.0,"beta":2.0,"flow":{"kind":"zero"},"t_end":0.5})";
}  // namespace

TEST_CASE("minimal config text fills defaults") {
    const Scenario sc = parse_config_text(kMinimal, "mem");
    CHECK(sc.name == "run");
    CHECK(sc.version == 1);
    CHECK(sc.base.d == 2);
    CHECK(sc.base.n == 64);
    CHECK(sc.base.t_end == 0.5);
    CHECK(sc.base.flow.kind == FlowKind::ZERO);
    CHECK(sc.base.diag_every == 100);
    CHECK(sc.base.dt_policy.kind == DtPolicyKind::CFL);
    CHECK(sc.base.initial.kind == InitialKind::BUMP);
    CHECK(sc.base.p_list == std::vector<double>{1.0, 2.0, 4.0, p_inf});
    CHECK_FALSE(sc.sweep.has_value());
    CHECK(sc.expect == ExpectOutcome::NONE);
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config_text(R"({"d":2,"n":32,"foo":1})", "mem");
        FAIL("missing config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    try {
        parse_config_text(R"({"d":2,"n":32,"flow":{"kind":"zero","bogus":3}})", "mem");
        FAIL("missing config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("flow.bogus") != std::string::npos);
    }
}

TEST_CASE("range errors name the offending key") {
    try {
        parse_config_text(R"({"d":2,"n":32,"alpha":3.0})", "mem");
        FAIL("missing config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text(R"({"d":2,"n":32,"version":2})", "mem"), config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"d":2,"n":32,"t_end":"soon"})", "mem"), config_error);
    CHECK_THROWS_AS(parse_config_text("{not json", "mem"), config_error);
    CHECK_THROWS_AS(parse_config(fs::temp_directory_path() / "ksmix_no_such_file.json"),
                    io_error);
}

TEST_CASE("p_list accepts numbers and the string inf") {
    const Scenario sc =
        parse_config_text(R"({"d":1,"n":32,"p_list":["inf",2],"dichotomy_p":2})", "mem");
    REQUIRE(sc.base.p_list.size() == 2);
    CHECK(sc.base.p_list[0] == p_inf);
    CHECK(sc.base.p_list[1] == 2.0);
    CHECK_THROWS_AS(parse_config_text(R"({"d":1,"n":32,"p_list":["huge"]})", "mem"), config_error);
}

TEST_CASE("sweep values are validated at parse time") {
    const Scenario sc = parse_config_text(
        R"({"d":2,"n":32,"flow":{"kind":"steady_shear","amplitude":1},
            "sweep":{"axis":"A","values":[0,10,100,1000]}})",
        "mem");
    REQUIRE(sc.sweep.has_value());
    CHECK(sc.sweep->axis == SweepAxis::A);
    REQUIRE(sc.sweep->values.size() == 4);
    const SimConfig child = apply_sweep_value(sc.base, sc.sweep->axis, 1000.0);
    CHECK(child.flow.amplitude == 1000.0);
    CHECK(sweep_point_label(SweepAxis::A, 1000.0) == "A=1000");
    CHECK(sweep_point_label(SweepAxis::N, 128.0) == "n=128");

    // a sweep that would push alpha out of range fails before any run starts
    CHECK_THROWS_AS(parse_config_text(
                        R"({"d":2,"n":32,"sweep":{"axis":"alpha","values":[1.0,2.5]}})", "mem"),
                    config_error);
    CHECK_THROWS_AS(apply_sweep_value(sc.base, SweepAxis::N, 48.5), config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"d":2,"n":32,"sweep":{"axis":"A"}})", "mem"),
                    config_error);
}

TEST_CASE("scenario run writes its artifact set deterministically") {
    const fs::path root = fs::temp_directory_path() / "ksmix_scenario_smoke";
    fs::remove_all(root);
    Scenario sc = parse_config_text(
        R"({"name":"smoke","d":2,"n":16,"alpha":1.0,"beta":2.0,"t_end":0.02,
            "diag_every":5,"dt_policy":{"kind":"fixed","dt":2e-3},
            "initial":{"kind":"bump","mass":1.0,"width":0.15},
            "snapshot_times":[0.0,0.02]})",
        "mem");
    sc.outputs = (root / "a").string();
    const ScenarioResult r1 = run_scenario(sc);
    CHECK(r1.exit_code == 0);
    REQUIRE(r1.children.size() == 1);
    CHECK(r1.children[0].status == SimStatus::COMPLETED);
    CHECK(fs::exists(fs::path(r1.out_dir) / "summary.csv"));
    const fs::path child = r1.children[0].dir;
    CHECK(fs::exists(child / "diag.csv"));
    CHECK(fs::exists(child / "verification.json"));
    CHECK(fs::exists(child / "snap_0.json"));
    CHECK(fs::exists(child / "snap_1.f64"));

    sc.outputs = (root / "b").string();
    const ScenarioResult r2 = run_scenario(sc);
    CHECK(slurp((fs::path(r1.children[0].dir) / "diag.csv").string()) ==
          slurp((fs::path(r2.children[0].dir) / "diag.csv").string()));

    // summary row carries the label and a parsable status
    const std::string summary = slurp((fs::path(r1.out_dir) / "summary.csv").string());
    CHECK(summary.find("base") != std::string::npos);
    CHECK(summary.find("COMPLETED") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("expected blowup remaps the exit code") {
    const fs::path root = fs::temp_directory_path() / "ksmix_scenario_blowup";
    fs::remove_all(root);
    Scenario sc = parse_config_text(
        R"({"name":"pop","d":2,"n":16,"alpha":1.0,"beta":2.0,"t_end":2.0,
            "diag_every":50,"blowup_threshold":1.0001,"blowup_tail_frac":0.0,
            "initial":{"kind":"bump","mass":6.0,"width":0.15},
            "expect":"blowup"})",
        "mem");
    sc.outputs = (root / "run").string();
    const ScenarioResult r = run_scenario(sc);
    CHECK(r.exit_code == 0);  // BLOWUP was the expected outcome
    REQUIRE(r.children.size() == 1);
    CHECK(r.children[0].status == SimStatus::BLOWUP);
    REQUIRE(r.children[0].blowup_time.has_value());
    CHECK(*r.children[0].blowup_time < 2.0);
    fs::remove_all(root);
}

TEST_CASE("unwritable output directory fails before any computation") {
    Scenario sc = parse_config_text(kMinimal, "mem");
    sc.outputs = "/proc/ksmix_nope/out";
    CHECK_THROWS_AS(run_scenario(sc), io_error);
}
