#include <doctest.h>

#include <cmath>
#include <limits>

#include "nagd/config.hpp"
#include "nagd/csv.hpp"

using namespace nagd;
using nlohmann::json;

namespace {

std::string rejected_field(const json& j, TaskKind task) {
    try {
        (void)spec_from_json(j, task);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "accepted";
}

} // namespace

TEST_CASE("round-trip decimal formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(22) == "22");
    CHECK(format_double(1e-10) == "1e-10");
    CHECK(format_double(-0.6) == "-0.6");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    for (double v : {1.0 / 3.0, 0.47081712062256809339, 1e-300, 6.02214076e23, 0.1156}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("csv writer") {
    CsvWriter w({"a", "b"});
    w.row({"1", "x,y"});
    CHECK(w.text() == "a,b\n1,\"x,y\"\n");
    CHECK(w.rows() == 1);
    CHECK_THROWS(w.row({"1"}));
}

TEST_CASE("every task's spec survives a JSON round trip") {
    for (TaskKind task : {TaskKind::function_race, TaskKind::layer_match, TaskKind::hybrid, TaskKind::rosetta_trace,
                          TaskKind::trace, TaskKind::field_grid}) {
        ExperimentSpec spec = default_spec(task);
        if (spec.optimizers.empty() && task == TaskKind::function_race) {
            spec.optimizers = {OptimizerSpec::sgd(0.1156), OptimizerSpec::adam(3e-4)};
            spec.sampled_alpha = SampledAlpha{0.25, 1.75, 17};
        }
        spec.base_seed = 18446744073709551615ULL;
        spec.hybrid_alpha = 0.1 + 0.2;
        const ExperimentSpec back = spec_from_json(json::parse(spec_to_json(spec).dump()), task);
        CHECK(back == spec);
        CHECK(back.base_seed == spec.base_seed);
        CHECK(back.hybrid_alpha == spec.hybrid_alpha);
    }
}

TEST_CASE("fields left out take the task defaults") {
    const ExperimentSpec lm = spec_from_json(json::object(), TaskKind::layer_match);
    CHECK(lm.n_runs == 50);
    CHECK(lm.max_steps == 4500);
    REQUIRE(lm.optimizers.size() == 1);
    CHECK(lm.optimizers[0] == OptimizerSpec::nasgd(0.7));

    const ExperimentSpec r = spec_from_json(
        json{{"function", "rosenbrock"}, {"start", {-3, -4}}, {"optimizers", {{{"kind", "sgd"}, {"eta", 0.001}}}}},
        TaskKind::function_race);
    CHECK(r.thresholds == std::vector<double>{1e2, 1e0, 1e-2, 1e-4, 1e-6});

    const ExperimentSpec mom =
        spec_from_json(json{{"optimizers", {{{"kind", "sgd"}, {"eta", 0.01}, {"mu", 0.9}}}}}, TaskKind::layer_match);
    CHECK(mom.optimizers[0] == OptimizerSpec::sgd(0.01, 0.9));
    CHECK(mom.optimizers[0].kind == OptimizerKind::momentum);

    const ExperimentSpec adam = spec_from_json(json{{"optimizers", {{{"kind", "adam"}}}}}, TaskKind::layer_match);
    CHECK(adam.optimizers[0].hp.eta == 0.001);
}

TEST_CASE("invalid configs name the offending field") {
    const json sgd = {{"kind", "sgd"}, {"eta", 0.1}};
    CHECK(rejected_field({{"optimizers", {sgd}}, {"thresholds", json::array()}}, TaskKind::function_race) ==
          "thresholds");
    CHECK(rejected_field({{"optimizers", {sgd}}, {"thresholds", {1e-4, 1e-2}}}, TaskKind::function_race) ==
          "thresholds");
    CHECK(rejected_field({{"thresholds", {1e-2}}}, TaskKind::function_race) == "optimizers");
    CHECK(rejected_field({{"n_runs", 0}}, TaskKind::layer_match) == "n_runs");
    CHECK(rejected_field({{"n_runs", 2.5}}, TaskKind::layer_match) == "n_runs");
    CHECK(rejected_field({{"max_steps", "many"}}, TaskKind::layer_match) == "max_steps");
    CHECK(rejected_field({{"base_seed", -1}}, TaskKind::layer_match) == "base_seed");
    CHECK(rejected_field({{"learning_rate", 0.1}}, TaskKind::layer_match) == "learning_rate");
    CHECK(rejected_field({{"optimizers", {{{"kind", "sgd"}, {"etta", 0.1}}}}}, TaskKind::layer_match) ==
          "optimizers[0].etta");
    CHECK(rejected_field({{"optimizers", {{{"kind", "lbfgs"}}}}}, TaskKind::layer_match) == "optimizers[0].kind");
    CHECK(rejected_field({{"optimizers", {{{"eta", 0.1}}}}}, TaskKind::layer_match) == "optimizers[0].kind");
    CHECK(rejected_field({{"optimizers", {{{"kind", "nasgd"}, {"alpha", -1}}}}}, TaskKind::layer_match) ==
          "optimizers[0]");
    CHECK(rejected_field({{"function", "himmelblau"}}, TaskKind::field_grid) == "function");
    CHECK(rejected_field({{"grid_x", {{"min", 0}, {"max", 1}, {"count", 0}}}}, TaskKind::field_grid) == "grid");
    CHECK(rejected_field({{"loss", "huber"}}, TaskKind::layer_match) == "loss");
    CHECK(rejected_field({{"aggregation", "median"}}, TaskKind::layer_match) == "aggregation");
    CHECK(rejected_field({{"task", "trace"}}, TaskKind::layer_match) == "task");
    CHECK(rejected_field({{"decay_windows", {1}}}, TaskKind::hybrid) == "decay_windows");
    CHECK(rejected_field(json::array(), TaskKind::hybrid) == "config");
    CHECK(rejected_field({{"optimizers", {sgd}}, {"start", {1}}}, TaskKind::trace) == "start");
}

TEST_CASE("a manifest is accepted as a config") {
    ExperimentSpec spec = default_spec(TaskKind::trace);
    spec.max_steps = 17;
    const json manifest = {{"spec", spec_to_json(spec)}, {"tool_version", "x"}, {"outputs", json::array()}};
    CHECK(spec_from_json(manifest, TaskKind::trace) == spec);
}
