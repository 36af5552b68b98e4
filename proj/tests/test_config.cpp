#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "mfl/config.hpp"
#include "mfl/errors.hpp"

using namespace mfl;

namespace {

std::string message_of(const std::string& json_text) {
    try {
        ExperimentConfig::parse(json_text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool rejected_with(const std::string& json_text, const std::string& needle) {
    const std::string msg = message_of(json_text);
    return !msg.empty() && msg.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("an empty object parses to the documented defaults") {
    const ExperimentConfig cfg = ExperimentConfig::parse("{}");
    CHECK(cfg.kind == ExperimentKind::chaos_study);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.seed == 1);
    CHECK(cfg.kernel.dim == 1);
    CHECK(cfg.kernel.drift == "trig_drift");
    CHECK(cfg.kernel.sigma == "trig_sigma");
    CHECK(cfg.init.amps == std::vector<double>{0.1});
    CHECK(cfg.pde.n == 128);
    CHECK(cfg.pde.dt == 0.0);
    CHECK(cfg.pde.stepper == "rk2");
    CHECK(cfg.particles.n_list == std::vector<int>{16, 32, 64, 128, 256, 512});
    CHECK(cfg.particles.replicas == 64);
    CHECK(cfg.metrics.bins == 16);
    CHECK(cfg.lde.eta_mode == "canonical");
    CHECK(cfg.lde.quad_n == 32);
}

TEST_CASE("serialize and parse round-trip losslessly") {
    const ExperimentConfig base = ExperimentConfig::parse("{}");
    const std::string text = base.serialize();
    const ExperimentConfig echo = ExperimentConfig::parse(text);
    CHECK(echo.serialize() == text);

    ExperimentConfig tweaked = base;
    tweaked.kind = ExperimentKind::lde_audit;
    tweaked.seed = 99;
    tweaked.output_dir = "elsewhere";
    tweaked.pde.t_end = 0.125;
    tweaked.pde.checkpoints = {0.05, 0.125};
    tweaked.particles.dt = 2.5e-4;
    tweaked.particles.n_list = {4, 8};
    tweaked.lde.eta_mode = "given";
    tweaked.lde.eta = 1e-5;
    const std::string text2 = tweaked.serialize();
    const ExperimentConfig echo2 = ExperimentConfig::parse(text2);
    CHECK(echo2.serialize() == text2);
    CHECK(echo2.kind == ExperimentKind::lde_audit);
    CHECK(echo2.pde.checkpoints == std::vector<double>{0.05, 0.125});
    CHECK(echo2.lde.eta == 1e-5);
}

TEST_CASE("experiment names map to kinds and bad names are listed") {
    CHECK(ExperimentConfig::parse(R"({"experiment": "simulate"})").kind ==
          ExperimentKind::simulate);
    CHECK(ExperimentConfig::parse(R"({"experiment": "solve_pde"})").kind ==
          ExperimentKind::solve_pde);
    CHECK(ExperimentConfig::parse(R"({"experiment": "enumerate"})").kind ==
          ExperimentKind::enumerate);
    CHECK(to_string(ExperimentKind::lde_audit) == "lde_audit");
    CHECK(rejected_with(R"({"experiment": "simulat"})", "not one of"));
}

TEST_CASE("malformed documents fail with pointed diagnostics") {
    CHECK(rejected_with("{not json", "not valid JSON"));
    CHECK(rejected_with("[1, 2]", "root must be a JSON object"));
    CHECK(rejected_with(R"({"pde": {"n": "big"}})", "pde.n: wrong type"));
    // Misspelled keys come back with the nearest valid key.
    CHECK(rejected_with(R"({"experimnt": "simulate"})", "nearest valid key: 'experiment'"));
    CHECK(rejected_with(R"({"particles": {"nlist": [4, 8]}})", "nearest valid key: 'n_list'"));
}

TEST_CASE("every violation is gathered into one report") {
    // Three independent problems: dt, stepper, bootstrap.
    const std::string msg = message_of(
        R"({"particles": {"dt": 0.0},
            "pde": {"stepper": "euler"},
            "metrics": {"bootstrap": 1}})");
    CHECK(msg.find("3 violation(s)") != std::string::npos);
    CHECK(msg.find("strictly positive time step") != std::string::npos);
    CHECK(msg.find("pde.stepper") != std::string::npos);
    CHECK(msg.find("metrics.bootstrap") != std::string::npos);
}

TEST_CASE("cross-module constraints are enforced") {
    CHECK(rejected_with(R"({"particles": {"dt": 0.0}})", "strictly positive time step"));
    CHECK(rejected_with(R"({"particles": {"dt": 3e-4}})", "integer multiple"));
    CHECK(rejected_with(R"({"particles": {"n_list": [16]}})", "at least 2 values"));
    CHECK(rejected_with(R"({"particles": {"n_list": [16, 8]}})", "strictly increasing"));
    CHECK(rejected_with(R"({"particles": {"n_list": [1, 8]}})", ">= 2"));
    CHECK(rejected_with(R"({"particles": {"replicas": 1}})", "replicas"));
    CHECK(rejected_with(R"({"particles": {"interaction": "tree"}})", "interaction"));
    CHECK(rejected_with(R"({"particles": {"interaction": "cell_list", "cutoff": 0.2}})",
                        "cutoff"));
    CHECK(rejected_with(R"({"pde": {"n": 65}})", "even integer"));
    CHECK(rejected_with(R"({"pde": {"n": 4}})", "even integer"));
    CHECK(rejected_with(R"({"pde": {"dt": -0.1}})", "pde.dt"));
    CHECK(rejected_with(R"({"pde": {"t_end": 0.0}})", "t_end"));
    CHECK(rejected_with(R"({"pde": {"checkpoints": [0.1, 0.5]}})", "within (0, t_end]"));
    CHECK(rejected_with(R"({"pde": {"checkpoints": [0.2, 0.1]}})", "strictly increasing"));
    CHECK(rejected_with(R"({"metrics": {"bins": 12}})", "divide pde.n"));
    CHECK(rejected_with(R"({"metrics": {"bins": -1}})", "metrics.bins"));
    CHECK(rejected_with(R"({"metrics": {"universal_c": 0.0}})", "universal_c"));
    CHECK(rejected_with(R"({"lde": {"eta_mode": "given"}})", "requires eta > 0"));
    CHECK(rejected_with(R"({"lde": {"eta_mode": "automatic"}})", "eta_mode"));
    CHECK(rejected_with(R"({"lde": {"quad_n": 16}})", "quad_n"));
    CHECK(rejected_with(R"({"lde": {"n_mc": 1}})", "n_mc"));
    CHECK(rejected_with(R"({"lde": {"enum_m_list": [0]}})", "enum_m_list"));
    CHECK(rejected_with(R"({"kernel": {"sigma_params": [1.0, 0.6, 1.0, 0.5]}})", "kernel:"));
    CHECK(rejected_with(R"({"kernel": {"dim": 3}})", "must be 1 or 2"));
    CHECK(rejected_with(R"({"init": {"amps": [0.6, 0.5]}})", "strictly positive"));

    // Metrics bins = 0 delegates to the sample-size rule and is accepted.
    CHECK(ExperimentConfig::parse(R"({"metrics": {"bins": 0}})").metrics.bins == 0);
    // eta_mode given with a positive eta is accepted.
    const auto given =
        ExperimentConfig::parse(R"({"lde": {"eta_mode": "given", "eta": 2e-5}})");
    CHECK(given.lde.eta == 2e-5);
}

TEST_CASE("typed errors carry the documented exit codes") {
    CHECK(static_cast<int>(ConfigError("x").exit_code()) == 2);
    CHECK(static_cast<int>(NumericalError("x").exit_code()) == 3);
    CHECK(static_cast<int>(BudgetError("x").exit_code()) == 4);
    CHECK(static_cast<int>(ExitCode::ok) == 0);
    // All three are catchable through the shared base.
    bool caught = false;
    try {
        throw BudgetError("too big");
    } catch (const Error& e) {
        caught = true;
        CHECK(static_cast<int>(e.exit_code()) == 4);
    }
    CHECK(caught);
}
