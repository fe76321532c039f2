#include "nagd/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <type_traits>

namespace nagd {

using nlohmann::json;

namespace {

std::vector<double> default_thresholds(const std::string& function) {
    if (function == "r" || function == "rosenbrock") {
        return {1e2, 1e0, 1e-2, 1e-4, 1e-6};
    }
    return {1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) {
        throw ConfigError(field, "expected a number");
    }
    return j.get<double>();
}

template <class Int>
Int get_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) {
        throw ConfigError(field, "expected an integer");
    }
    if constexpr (std::is_unsigned_v<Int>) {
        if (j.is_number_unsigned()) {
            return static_cast<Int>(j.get<std::uint64_t>());
        }
        if (j.get<std::int64_t>() < 0) {
            throw ConfigError(field, "must be nonnegative");
        }
    }
    const auto v = j.get<std::int64_t>();
    if constexpr (!std::is_unsigned_v<Int>) {
        if (v < std::numeric_limits<Int>::min() || v > static_cast<std::int64_t>(std::numeric_limits<Int>::max())) {
            throw ConfigError(field, "is out of range");
        }
    }
    return static_cast<Int>(v);
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) {
        throw ConfigError(field, "expected a string");
    }
    return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& field) {
    if (!j.is_array()) {
        throw ConfigError(field, "expected a list of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown field");
        }
    }
}

json axis_to_json(const GridAxis& a) { return {{"min", a.min}, {"max", a.max}, {"count", a.count}}; }

GridAxis axis_from_json(const json& j, GridAxis axis, const std::string& field) {
    if (!j.is_object()) {
        throw ConfigError(field, "expected an object with min, max, count");
    }
    reject_unknown(j, {"min", "max", "count"}, field);
    if (j.contains("min")) {
        axis.min = get_number(j["min"], field + ".min");
    }
    if (j.contains("max")) {
        axis.max = get_number(j["max"], field + ".max");
    }
    if (j.contains("count")) {
        axis.count = get_integer<std::size_t>(j["count"], field + ".count");
    }
    return axis;
}

} // namespace

ExperimentSpec default_spec(TaskKind task) {
    ExperimentSpec spec;
    spec.task = task;
    switch (task) {
    case TaskKind::function_race:
        spec.thresholds = default_thresholds(spec.function);
        spec.max_steps = 200000;
        break;
    case TaskKind::layer_match:
        spec.max_steps = 4500;
        spec.n_runs = 50;
        spec.optimizers = {OptimizerSpec::nasgd(0.7)};
        break;
    case TaskKind::hybrid:
        spec.max_steps = 1500;
        spec.n_runs = 50;
        break;
    case TaskKind::rosetta_trace:
        spec.max_steps = 4500;
        spec.record_every = 1;
        spec.optimizers = {OptimizerSpec::sgd(0.1)};
        break;
    case TaskKind::trace:
        spec.max_steps = 6000;
        spec.optimizers = {OptimizerSpec::nasgd(0.007)};
        break;
    case TaskKind::field_grid:
        break;
    }
    return spec;
}

json optimizer_to_json(const OptimizerSpec& opt) {
    const Hyperparameters& hp = opt.hp;
    return {{"kind", std::string(to_string(opt.kind))},
            {"eta", hp.eta},
            {"alpha", hp.alpha},
            {"mu", hp.mu},
            {"beta1", hp.beta1},
            {"beta2", hp.beta2},
            {"eps", hp.eps},
            {"rho", hp.rho},
            {"decay_base", hp.decay_base},
            {"lower_bound", hp.lower_bound},
            {"clamp", hp.clamp},
            {"monitor_threshold", hp.monitor_threshold},
            {"monitor_patience", hp.monitor_patience},
            {"monitor_factor", hp.monitor_factor}};
}

OptimizerSpec optimizer_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where, "expected an object");
    }
    if (!j.contains("kind")) {
        throw ConfigError(where + ".kind", "is required");
    }
    reject_unknown(j,
                   {"kind", "eta", "alpha", "mu", "beta1", "beta2", "eps", "rho", "decay_base", "lower_bound",
                    "clamp", "monitor_threshold", "monitor_patience", "monitor_factor"},
                   where);
    OptimizerKind kind;
    try {
        kind = parse_optimizer_kind(get_string(j["kind"], where + ".kind"));
    } catch (const ContractViolation& e) {
        throw ConfigError(where + ".kind", e.what());
    }
    OptimizerSpec opt = OptimizerSpec::defaults(kind);
    Hyperparameters& hp = opt.hp;
    const auto number = [&](const char* key, double& slot) {
        if (j.contains(key)) {
            slot = get_number(j[key], where + "." + key);
        }
    };
    number("eta", hp.eta);
    number("alpha", hp.alpha);
    number("mu", hp.mu);
    number("beta1", hp.beta1);
    number("beta2", hp.beta2);
    number("eps", hp.eps);
    number("rho", hp.rho);
    number("decay_base", hp.decay_base);
    number("lower_bound", hp.lower_bound);
    number("clamp", hp.clamp);
    number("monitor_threshold", hp.monitor_threshold);
    number("monitor_factor", hp.monitor_factor);
    if (j.contains("monitor_patience")) {
        hp.monitor_patience = get_integer<int>(j["monitor_patience"], where + ".monitor_patience");
    }
    if (opt.kind == OptimizerKind::sgd && hp.mu != 0.0) {
        opt.kind = OptimizerKind::momentum;
    }
    try {
        opt.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(where, e.what());
    }
    return opt;
}

json spec_to_json(const ExperimentSpec& spec) {
    json opts = json::array();
    for (const OptimizerSpec& o : spec.optimizers) {
        opts.push_back(optimizer_to_json(o));
    }
    json sampled = nullptr;
    if (spec.sampled_alpha) {
        sampled = {{"lo", spec.sampled_alpha->lo}, {"hi", spec.sampled_alpha->hi},
                   {"trials", spec.sampled_alpha->trials}};
    }
    return {{"task", std::string(to_string(spec.task))},
            {"function", spec.function},
            {"start", spec.start},
            {"thresholds", spec.thresholds},
            {"optimizers", opts},
            {"sampled_alpha", sampled},
            {"max_steps", spec.max_steps},
            {"n_runs", spec.n_runs},
            {"base_seed", spec.base_seed},
            {"record_every", spec.record_every},
            {"loss", std::string(to_string(spec.loss))},
            {"aggregation", std::string(to_string(spec.aggregation))},
            {"decay_windows", spec.decay_windows},
            {"hybrid_alpha", spec.hybrid_alpha},
            {"grid_x", axis_to_json(spec.grid_x)},
            {"grid_y", axis_to_json(spec.grid_y)},
            {"eta_star", spec.eta_star},
            {"alpha_star", spec.alpha_star},
            {"threads", spec.threads}};
}

ExperimentSpec spec_from_json(const json& input, TaskKind task) {
    const json* jp = &input;
    if (input.is_object() && input.contains("spec") && input.contains("tool_version")) {
        jp = &input["spec"];
    }
    const json& j = *jp;
    if (!j.is_object()) {
        throw ConfigError("config", "top level must be an object");
    }
    reject_unknown(j,
                   {"task", "function", "start", "thresholds", "optimizers", "sampled_alpha", "max_steps", "n_runs",
                    "base_seed", "record_every", "loss", "aggregation", "decay_windows", "hybrid_alpha", "grid_x",
                    "grid_y", "eta_star", "alpha_star", "threads"},
                   "");
    if (j.contains("task")) {
        const TaskKind named = parse_task_kind(get_string(j["task"], "task"));
        if (named != task) {
            throw ConfigError("task", "config is for '" + std::string(to_string(named)) + "', not '" +
                                          std::string(to_string(task)) + "'");
        }
    }
    ExperimentSpec spec = default_spec(task);
    if (j.contains("function")) {
        spec.function = get_string(j["function"], "function");
    }
    if (j.contains("start")) {
        spec.start = get_numbers(j["start"], "start");
    }
    if (j.contains("thresholds")) {
        spec.thresholds = get_numbers(j["thresholds"], "thresholds");
    } else if (task == TaskKind::function_race) {
        spec.thresholds = default_thresholds(spec.function);
    }
    if (j.contains("optimizers")) {
        const json& arr = j["optimizers"];
        if (!arr.is_array()) {
            throw ConfigError("optimizers", "expected a list");
        }
        spec.optimizers.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            spec.optimizers.push_back(optimizer_from_json(arr[i], "optimizers[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("sampled_alpha")) {
        const json& s = j["sampled_alpha"];
        if (s.is_null()) {
            spec.sampled_alpha.reset();
        } else {
            if (!s.is_object()) {
                throw ConfigError("sampled_alpha", "expected an object with lo, hi, trials");
            }
            reject_unknown(s, {"lo", "hi", "trials"}, "sampled_alpha");
            SampledAlpha sa;
            if (s.contains("lo")) {
                sa.lo = get_number(s["lo"], "sampled_alpha.lo");
            }
            if (s.contains("hi")) {
                sa.hi = get_number(s["hi"], "sampled_alpha.hi");
            }
            if (s.contains("trials")) {
                sa.trials = get_integer<int>(s["trials"], "sampled_alpha.trials");
            }
            spec.sampled_alpha = sa;
        }
    }
    if (j.contains("max_steps")) {
        spec.max_steps = get_integer<std::int64_t>(j["max_steps"], "max_steps");
    }
    if (j.contains("n_runs")) {
        spec.n_runs = get_integer<int>(j["n_runs"], "n_runs");
    }
    if (j.contains("base_seed")) {
        spec.base_seed = get_integer<std::uint64_t>(j["base_seed"], "base_seed");
    }
    if (j.contains("record_every")) {
        spec.record_every = get_integer<int>(j["record_every"], "record_every");
    }
    if (j.contains("loss")) {
        try {
            spec.loss = parse_loss_kind(get_string(j["loss"], "loss"));
        } catch (const ContractViolation& e) {
            throw ConfigError("loss", e.what());
        }
    }
    if (j.contains("aggregation")) {
        spec.aggregation = parse_aggregation(get_string(j["aggregation"], "aggregation"));
    }
    if (j.contains("decay_windows")) {
        if (!j["decay_windows"].is_array()) {
            throw ConfigError("decay_windows", "expected a list of integers");
        }
        spec.decay_windows.clear();
        for (const json& w : j["decay_windows"]) {
            spec.decay_windows.push_back(get_integer<int>(w, "decay_windows"));
        }
    }
    if (j.contains("hybrid_alpha")) {
        spec.hybrid_alpha = get_number(j["hybrid_alpha"], "hybrid_alpha");
    }
    if (j.contains("grid_x")) {
        spec.grid_x = axis_from_json(j["grid_x"], spec.grid_x, "grid_x");
    }
    if (j.contains("grid_y")) {
        spec.grid_y = axis_from_json(j["grid_y"], spec.grid_y, "grid_y");
    }
    if (j.contains("eta_star")) {
        spec.eta_star = get_number(j["eta_star"], "eta_star");
    }
    if (j.contains("alpha_star")) {
        spec.alpha_star = get_number(j["alpha_star"], "alpha_star");
    }
    if (j.contains("threads")) {
        spec.threads = get_integer<unsigned>(j["threads"], "threads");
    }
    spec.validate();
    return spec;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot read " + path.string());
    }
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", e.what());
    }
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) { return spec_to_json(a) == spec_to_json(b); }

} // namespace nagd
