#include "kaf/experiment.hpp"

#include <doctest.h>

#include <clocale>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace kaf;

namespace {

const char* kMinimal = R"(
# minimal
system = example1
kernel.xi = 0.02
filter.eta = 0.01
input.segments = 300@0.35, 200@0.15
dictionary.spec = 10@0.35 ; 10@0.15 + 10@0.35
)";

bool mentions(const ConfigError& e, const std::string& key) {
    for (const auto& i : e.issues())
        if (i.key == key) return true;
    return false;
}

std::vector<ConfigIssue> issues_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const auto c = parse_config(kMinimal);
    CHECK(c.mc.mu0 == 0.01);
    CHECK(c.mc.runs == 200);
    CHECK(c.mc.noise_variance == 1e-4);
    CHECK(c.mc.mode == DictionaryMode::fixed);
    CHECK(c.mc.reg.kind == RegularizerKind::none);
    CHECK_FALSE(c.model_enabled);
    REQUIRE(c.mc.schedule.segments.size() == 2);
    CHECK(c.mc.schedule.segments[1].length == 200);
    CHECK(c.mc.schedule.segments[1].sigma == 0.15);
    REQUIRE(c.mc.dictionaries.size() == 2);
    CHECK(dictionary_size(c.mc.dictionaries[1]) == 20);
}

TEST_CASE("number syntax") {
    CHECK(parse_number("sqrt(0.0656)") == std::sqrt(0.0656));
    CHECK(parse_number(" 2e4 ") == 20000.0);
    CHECK_THROWS_AS(parse_number("0.1x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number("sqrt(-1)"), std::invalid_argument);
    CHECK(parse_segments("2e4@0.35, 10@sqrt(4)")[1].sigma == 2.0);
    CHECK_THROWS_AS(parse_segments("20000:0.35"), std::invalid_argument);
    CHECK(parse_dictionary_specs("1@1 + 2@2 ; 3@3").size() == 2);
}

TEST_CASE("negative bandwidth names the key") {
    std::string t = kMinimal;
    t.replace(t.find("0.02"), 4, "-0.02");
    const auto is = issues_of(t);
    REQUIRE(is.size() == 1);
    CHECK(is[0].key == "kernel.xi");
    CHECK(is[0].line == 4);
}

TEST_CASE("duplicate and unknown keys") {
    const auto dup = issues_of(std::string(kMinimal) + "filter.eta = 0.02\n");
    REQUIRE(dup.size() == 1);
    CHECK(dup[0].message.find("duplicate") != std::string::npos);
    const auto unk = issues_of(std::string(kMinimal) + "filter.etta = 0.02\n");
    REQUIRE(unk.size() == 1);
    CHECK(unk[0].key == "filter.etta");
}

TEST_CASE("every violation is reported") {
    const std::string t = "system = example3\nkernel.xi = 0\nmc.runs = 0\nmodel.enabled = maybe\nbogus\n";
    try {
        parse_config(t);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        for (const char* k : {"system", "kernel.xi", "mc.runs", "model.enabled", "filter.eta", "input.segments"})
            CHECK(mentions(e, k));
        CHECK(e.issues().size() >= 7);
    }
}

TEST_CASE("cross-key constraints") {
    CHECK(issues_of(std::string(kMinimal) + "reg.kind = l1\n").size() == 1);
    const std::string learned = "system = example1\nkernel.xi = 0.02\nfilter.eta = 0.01\n"
                                "input.segments = 100@0.35\ndictionary.mode = learned\n";
    CHECK(issues_of(learned).empty());
    CHECK(issues_of(learned + "model.enabled = true\n").size() == 1);
    CHECK(issues_of(std::string(kMinimal) + "model.enabled = true\nmodel.L = 10\n").empty());
    CHECK(issues_of(std::string(kMinimal) + "model.enabled = true\nmodel.L = 0\n").size() == 1);
    const std::string three = "system = example1\nkernel.xi = 0.02\nfilter.eta = 0.01\n"
                              "input.segments = 100@0.35, 100@0.15\ndictionary.spec = 1@1;1@1;1@1\n";
    CHECK(issues_of(three).size() == 1);
}

TEST_CASE("number formatting ignores the locale") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(-22.04) == "-22.04");
    const char* old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) CHECK(format_number(0.5) == "0.5");
    std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("experiment artifacts") {
    auto cfg = parse_config(std::string(kMinimal) + "mc.runs = 3\n");
    const auto r = run_experiment(cfg);
    CHECK(r.model_db.empty());
    const auto curves = curves_csv(r);
    std::istringstream lines(curves);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "n,mse_db_mc,mse_db_model,dict_size_mean");
    CHECK(first.find(",,") != std::string::npos);
    CHECK(std::count(curves.begin(), curves.end(), '\n') == 501);
    CHECK(summary_csv(r) == "J_min_db,J_ms_inf_db,J_ex_inf_db,n_eps,eta_max\n,,,,\n");
    CHECK(curves_csv(run_experiment(cfg)) == curves);

    cfg.model_enabled = true;
    cfg.moment_samples = 20000;
    const auto m = run_experiment(cfg);
    REQUIRE(m.model_db.size() == 500);
    CHECK(m.summary.model_run);
    CHECK(std::isfinite(m.model_db[0]));
    CHECK(m.segment_models.size() == 2);
    CHECK(summary_csv(m).find("unstable") == std::string::npos);

    cfg.mc.eta = 3.0 * m.summary.eta_max;
    const auto u = run_experiment(cfg);
    CHECK(u.summary.unstable);
    CHECK(summary_csv(u).find("unstable,unstable,unstable,") != std::string::npos);
}

TEST_CASE("long curves are downsampled for output") {
    auto cfg = parse_config("system = example1\nkernel.xi = 0.02\nfilter.eta = 0.01\ninput.segments = 250000@0.15\n"
                            "dictionary.spec = 2@0.15\nmc.runs = 1\n");
    const auto r = run_experiment(cfg);
    const auto curves = curves_csv(r);
    CHECK(std::count(curves.begin(), curves.end(), '\n') == 1 + 83334);
}
