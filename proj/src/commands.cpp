#include "nagd/commands.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "nagd/config.hpp"
#include "nagd/random.hpp"

namespace nagd {

using nlohmann::json;

namespace {

std::string fmt(double v) { return format_double(v); }

std::string fmt(std::int64_t v) { return std::to_string(v); }

std::string table_name(const std::string& base, const ExperimentSpec& spec, std::size_t k) {
    if (spec.optimizers.size() <= 1) {
        return base + ".csv";
    }
    return base + "_" + std::to_string(k) + "_" + optimizer_slug(spec.optimizers[k]) + ".csv";
}

void race_tables(const ExperimentSpec& spec, std::vector<OutputTable>& out) {
    CsvWriter csv({"optimizer", "hyperparams", "threshold", "steps", "diverged"});
    for (const OptimizerSpec& opt : spec.optimizers) {
        const RaceResult r = run_race(spec, opt);
        for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
            std::string steps;
            if (r.steps_to_threshold[k]) {
                steps = fmt(*r.steps_to_threshold[k]);
            } else {
                steps = r.diverged ? "diverged" : "unreached";
            }
            csv.row({std::string(to_string(opt.kind)), hyperparams_string(opt), fmt(r.thresholds[k]), steps,
                     r.diverged ? "true" : "false"});
        }
    }
    if (spec.sampled_alpha) {
        const SampledRaceResult r = run_sampled_alpha(spec, *spec.sampled_alpha);
        const int trials = spec.sampled_alpha->trials;
        const std::string hp = "alpha~U[" + fmt(r.sampling.lo) + "," + fmt(r.sampling.hi) + ");trials=" +
                               std::to_string(trials) + ";diverged_trials=" + std::to_string(r.diverged);
        for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
            std::string steps;
            if (r.mean_steps[k]) {
                steps = fmt(*r.mean_steps[k]);
            } else {
                steps = r.diverged == trials ? "diverged" : "unreached";
            }
            csv.row({"nasgd", hp, fmt(r.thresholds[k]), steps, r.diverged == trials ? "true" : "false"});
        }
    }
    out.push_back({"race.csv", std::move(csv)});
}

void layer_match_tables(const ExperimentSpec& spec, std::vector<OutputTable>& out) {
    for (std::size_t k = 0; k < spec.optimizers.size(); ++k) {
        const LayerCurve c = run_layer_match(spec, spec.optimizers[k]);
        CsvWriter csv({"step", "mean_log10_distance", "mean_equivalent_eta", "mean_equivalent_alpha", "n_active_runs"});
        for (std::size_t i = 0; i < c.steps.size(); ++i) {
            csv.row({fmt(c.steps[i]), fmt(c.log10_distance[i]), fmt(c.mean_equivalent_eta[i]),
                     fmt(c.mean_equivalent_alpha[i]), std::to_string(c.n_active_runs[i])});
        }
        out.push_back({table_name("layer_match", spec, k), std::move(csv)});
    }
}

void hybrid_tables(const ExperimentSpec& spec, std::vector<OutputTable>& out) {
    const HybridResult h = run_hybrid_comparison(spec);
    CsvWriter series({"series", "step", "mean_log10_distance", "mean_learning_rate", "n_active_runs"});
    for (const HybridSeries& s : h.series) {
        for (std::size_t i = 0; i < s.curve.steps.size(); ++i) {
            series.row({s.label, fmt(s.curve.steps[i]), fmt(s.curve.log10_distance[i]),
                        fmt(s.curve.mean_equivalent_eta[i]), std::to_string(s.curve.n_active_runs[i])});
        }
    }
    CsvWriter fits({"series", "window", "eta0", "base", "excluded_points"});
    for (const DecayFit& f : h.fits) {
        fits.row({decay_label(f.window), std::to_string(f.window), fmt(f.eta0), fmt(f.base),
                  std::to_string(f.excluded)});
    }
    out.push_back({"hybrid.csv", std::move(series)});
    out.push_back({"decay_fits.csv", std::move(fits)});
}

void rosetta_tables(const ExperimentSpec& spec, std::vector<OutputTable>& out) {
    for (std::size_t k = 0; k < spec.optimizers.size(); ++k) {
        const std::vector<LayerRun> runs = run_layer_runs(spec, spec.optimizers[k], spec.max_steps, spec.record_every);
        CsvWriter csv({"run", "step", "loss", "equivalent_eta", "equivalent_alpha"});
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const LayerRun& run = runs[r];
            for (std::size_t i = 0; i < run.steps.size(); ++i) {
                csv.row({std::to_string(r), fmt(run.steps[i]), fmt(run.loss[i]), fmt(run.equivalent_eta[i]),
                         run.equivalent_alpha[i] ? fmt(*run.equivalent_alpha[i]) : "undefined"});
            }
        }
        out.push_back({table_name("rosetta", spec, k), std::move(csv)});
    }
}

void trace_tables(const ExperimentSpec& spec, std::vector<OutputTable>& out) {
    const Objective obj = objective_by_name(spec.function);
    for (std::size_t k = 0; k < spec.optimizers.size(); ++k) {
        const Trace t = trajectory_trace(obj, spec.optimizers[k], ParamVector(spec.start), spec.max_steps);
        CsvWriter csv({"step", "x", "y", "f"});
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            csv.row({std::to_string(i), fmt(t.points[i][0]), fmt(t.points[i][1]), fmt(t.values[i])});
        }
        if (t.diverged) {
            csv.row({std::to_string(t.points.size()), "diverged", "", ""});
        }
        out.push_back({table_name("trace", spec, k), std::move(csv)});
    }
}

void field_grid_tables(const ExperimentSpec& spec, std::vector<OutputTable>& out) {
    const Objective obj = objective_by_name(spec.function);
    CsvWriter csv({"x", "y", "ratio"});
    for (const FieldRatio& p : field_ratio_grid(obj, spec.grid_x, spec.grid_y, spec.eta_star, spec.alpha_star)) {
        csv.row({fmt(p.x), fmt(p.y), fmt(p.ratio)});
    }
    out.push_back({"field_grid.csv", std::move(csv)});
}

} // namespace

std::string hyperparams_string(const OptimizerSpec& opt) {
    const Hyperparameters& hp = opt.hp;
    std::vector<std::pair<const char*, std::string>> kv;
    switch (opt.kind) {
    case OptimizerKind::sgd:
        kv = {{"eta", fmt(hp.eta)}};
        break;
    case OptimizerKind::momentum:
        kv = {{"eta", fmt(hp.eta)}, {"mu", fmt(hp.mu)}};
        break;
    case OptimizerKind::nasgd:
        kv = {{"alpha", fmt(hp.alpha)}};
        if (hp.lower_bound != 0.0) {
            kv.emplace_back("lower_bound", fmt(hp.lower_bound));
        }
        if (hp.clamp != 1.0) {
            kv.emplace_back("clamp", fmt(hp.clamp));
        }
        break;
    case OptimizerKind::adam:
        kv = {{"eta", fmt(hp.eta)}, {"beta1", fmt(hp.beta1)}, {"beta2", fmt(hp.beta2)}, {"eps", fmt(hp.eps)}};
        break;
    case OptimizerKind::rmsprop:
        kv = {{"eta", fmt(hp.eta)}, {"rho", fmt(hp.rho)}, {"eps", fmt(hp.eps)}};
        break;
    case OptimizerKind::adagrad:
        kv = {{"eta", fmt(hp.eta)}, {"eps", fmt(hp.eps)}};
        break;
    case OptimizerKind::exp_decay:
        kv = {{"eta", fmt(hp.eta)}, {"decay_base", fmt(hp.decay_base)}};
        break;
    case OptimizerKind::alpha_monitor:
        kv = {{"eta", fmt(hp.eta)},
              {"threshold", fmt(hp.monitor_threshold)},
              {"patience", std::to_string(hp.monitor_patience)},
              {"factor", fmt(hp.monitor_factor)}};
        if (hp.lower_bound != 0.0) {
            kv.emplace_back("lower_bound", fmt(hp.lower_bound));
        }
        break;
    }
    std::string s;
    for (const auto& [k, v] : kv) {
        if (!s.empty()) {
            s += ';';
        }
        s += k;
        s += '=';
        s += v;
    }
    return s;
}

std::string optimizer_slug(const OptimizerSpec& opt) {
    std::string s = std::string(to_string(opt.kind)) + "_" + hyperparams_string(opt);
    for (char& c : s) {
        if (c == '=' || c == ';' || c == '-') {
            c = '_';
        }
    }
    return s;
}

std::vector<OutputTable> render_tables(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<OutputTable> out;
    switch (spec.task) {
    case TaskKind::function_race:
        race_tables(spec, out);
        break;
    case TaskKind::layer_match:
        layer_match_tables(spec, out);
        break;
    case TaskKind::hybrid:
        hybrid_tables(spec, out);
        break;
    case TaskKind::rosetta_trace:
        rosetta_tables(spec, out);
        break;
    case TaskKind::trace:
        trace_tables(spec, out);
        break;
    case TaskKind::field_grid:
        field_grid_tables(spec, out);
        break;
    }
    return out;
}

std::vector<std::filesystem::path> execute(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
    // Everything is computed before the first byte reaches disk.
    const std::vector<OutputTable> tables = render_tables(spec);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path manifest_path = out_dir / "manifest.json";
    std::filesystem::remove(manifest_path);

    std::vector<std::filesystem::path> written;
    json outputs = json::array();
    for (const OutputTable& t : tables) {
        const std::filesystem::path p = out_dir / t.file_name;
        t.csv.write(p);
        written.push_back(p);
        outputs.push_back(t.file_name);
    }
    const json manifest = {{"spec", spec_to_json(spec)},
                           {"tool_version", kToolVersion},
                           {"rng_algorithm", std::string(Rng::kAlgorithm)},
                           {"outputs", outputs},
                           {"status", "complete"}};
    write_file_atomically(manifest_path, manifest.dump(2) + "\n");
    written.push_back(manifest_path);
    return written;
}

namespace {

// Flag values for one subcommand. Each applier copies a flag that was given
// on the command line into the JSON config, so flags override the file.
struct Flags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int runs = 0;
    std::int64_t max_steps = 0;
    int record_every = 0;
    std::vector<std::string> optimizer;
    double eta = 0, alpha = 0, mu = 0, beta1 = 0, beta2 = 0, eps = 0, lower_bound = 0;
    double rho = 0, decay_base = 0, clamp = 0, monitor_threshold = 0, monitor_factor = 0;
    int monitor_patience = 0;
    std::string function;
    std::vector<double> start;
    std::vector<double> thresholds;
    std::vector<double> alpha_interval;
    int trials = 0;
    std::string loss;
    std::string aggregate;
    std::vector<int> decay_windows;
    double hybrid_alpha = 0;
    std::vector<double> grid_x;
    std::vector<double> grid_y;
    double eta_star = 0, alpha_star = 0;
    unsigned threads = 0;

    std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> appliers;
};

json& optimizer_list(json& j, TaskKind task, const std::string& flag) {
    if (!j.contains("optimizers")) {
        json arr = json::array();
        for (const OptimizerSpec& o : default_spec(task).optimizers) {
            arr.push_back({{"kind", std::string(to_string(o.kind))}});
            for (const auto& [k, v] : optimizer_to_json(o).items()) {
                arr.back()[k] = v;
            }
        }
        if (arr.empty() && task == TaskKind::hybrid) {
            arr.push_back({{"kind", "alpha-monitor"}});
        }
        j["optimizers"] = arr;
    }
    json& arr = j["optimizers"];
    if (!arr.is_array() || arr.empty()) {
        throw ConfigError(flag, "no optimizer to apply it to; pass --optimizer");
    }
    return arr;
}

void add_flags(CLI::App* sub, TaskKind task, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file (or a manifest.json from an earlier run)");
    sub->add_option("--out", f.out, "Output directory (default: $NAGD_OUT_DIR or ./nagd_out)");

    const auto on = [&f](CLI::Option* opt, std::function<void(json&)> apply) {
        f.appliers.emplace_back(opt, std::move(apply));
    };
    const auto set = [&](const char* flag, const char* key, auto& slot, const char* help) {
        on(sub->add_option(flag, slot, help), [key, &slot](json& j) { j[key] = slot; });
    };

    set("--seed", "base_seed", f.seed, "Base seed; run i uses seed + i");
    set("--runs", "n_runs", f.runs, "Number of seeded runs");
    set("--max-steps", "max_steps", f.max_steps, "Step budget");
    set("--record-every", "record_every", f.record_every, "Recording cadence in steps");
    on(sub->add_option("--optimizer", f.optimizer, "Optimizer kind; repeat for several")->expected(1, -1),
       [&f](json& j) {
           json arr = json::array();
           for (const std::string& name : f.optimizer) {
               arr.push_back({{"kind", name}});
           }
           j["optimizers"] = arr;
       });

    const auto hp = [&](const char* flag, const char* key, auto& slot, const char* help) {
        on(sub->add_option(flag, slot, help), [task, flag, key, &slot](json& j) {
            if (task == TaskKind::field_grid && std::string_view(key) == "eta") {
                j["eta_star"] = slot;
                return;
            }
            if (task == TaskKind::field_grid && std::string_view(key) == "alpha") {
                j["alpha_star"] = slot;
                return;
            }
            if (task == TaskKind::hybrid && std::string_view(key) == "alpha") {
                j["hybrid_alpha"] = slot;
                return;
            }
            for (json& o : optimizer_list(j, task, flag)) {
                o[key] = slot;
            }
        });
    };
    hp("--eta", "eta", f.eta, "Learning rate");
    hp("--alpha", "alpha", f.alpha, "NaSGD alpha");
    hp("--mu", "mu", f.mu, "Momentum");
    hp("--beta1", "beta1", f.beta1, "Adam first-moment decay");
    hp("--beta2", "beta2", f.beta2, "Adam second-moment decay");
    hp("--eps", "eps", f.eps, "Denominator epsilon");
    hp("--lower-bound", "lower_bound", f.lower_bound, "Known lower bound L of the objective");
    hp("--rho", "rho", f.rho, "RMSprop decay");
    hp("--decay-base", "decay_base", f.decay_base, "Per-step learning-rate factor for exp-decay");
    hp("--clamp", "clamp", f.clamp, "NaSGD coefficient cap (advanced)");
    hp("--monitor-threshold", "monitor_threshold", f.monitor_threshold, "Alpha-monitor threshold");
    hp("--monitor-patience", "monitor_patience", f.monitor_patience, "Alpha-monitor patience");
    hp("--monitor-factor", "monitor_factor", f.monitor_factor, "Alpha-monitor decay factor");

    set("--function", "function", f.function, "Objective: q or rosenbrock");
    on(sub->add_option("--start", f.start, "Start point X Y")->expected(2),
       [&f](json& j) { j["start"] = f.start; });
    on(sub->add_option("--thresholds", f.thresholds, "Descending thresholds")->expected(1, -1),
       [&f](json& j) { j["thresholds"] = f.thresholds; });
    on(sub->add_option("--alpha-interval", f.alpha_interval, "Sample NaSGD alpha uniformly from [LO, HI)")
           ->expected(2),
       [&f](json& j) {
           json s = j.contains("sampled_alpha") && j["sampled_alpha"].is_object() ? j["sampled_alpha"] : json::object();
           s["lo"] = f.alpha_interval[0];
           s["hi"] = f.alpha_interval[1];
           j["sampled_alpha"] = s;
       });
    on(sub->add_option("--trials", f.trials, "Trials for sampled alpha"), [&f](json& j) {
        json s = j.contains("sampled_alpha") && j["sampled_alpha"].is_object() ? j["sampled_alpha"] : json::object();
        s["trials"] = f.trials;
        j["sampled_alpha"] = s;
    });
    set("--loss", "loss", f.loss, "Training loss: distance or squared-distance");
    set("--aggregate", "aggregation", f.aggregate, "Curve aggregation: mean-log10 or log10-mean");
    on(sub->add_option("--decay-windows", f.decay_windows, "Fit windows for the decay schedules")->expected(1, -1),
       [&f](json& j) { j["decay_windows"] = f.decay_windows; });
    set("--hybrid-alpha", "hybrid_alpha", f.hybrid_alpha, "NaSGD alpha the decay schedules are fitted to");
    on(sub->add_option("--grid-x", f.grid_x, "MIN MAX COUNT")->expected(3), [&f](json& j) {
        j["grid_x"] = {{"min", f.grid_x[0]}, {"max", f.grid_x[1]}, {"count", f.grid_x[2]}};
    });
    on(sub->add_option("--grid-y", f.grid_y, "MIN MAX COUNT")->expected(3), [&f](json& j) {
        j["grid_y"] = {{"min", f.grid_y[0]}, {"max", f.grid_y[1]}, {"count", f.grid_y[2]}};
    });
    set("--eta-star", "eta_star", f.eta_star, "Reference SGD learning rate for the field grid");
    set("--alpha-star", "alpha_star", f.alpha_star, "Reference NaSGD alpha for the field grid");
    set("--threads", "threads", f.threads, "Worker threads (0 = all cores); results do not depend on it");
}

json grid_counts_as_integers(json j) {
    for (const char* axis : {"grid_x", "grid_y"}) {
        if (j.contains(axis) && j[axis].is_object() && j[axis].contains("count") && j[axis]["count"].is_number_float()) {
            const double c = j[axis]["count"].get<double>();
            if (c >= 0 && c == static_cast<double>(static_cast<std::int64_t>(c))) {
                j[axis]["count"] = static_cast<std::int64_t>(c);
            }
        }
    }
    return j;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Norm-adapted gradient descent and reference optimizers: benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    const std::vector<std::pair<TaskKind, const char*>> commands = {
        {TaskKind::function_race, "race"},       {TaskKind::layer_match, "layer-match"},
        {TaskKind::hybrid, "hybrid"},            {TaskKind::rosetta_trace, "rosetta"},
        {TaskKind::trace, "trace"},              {TaskKind::field_grid, "field-grid"},
    };
    const std::vector<const char*> blurbs = {
        "Steps to reach each threshold on an analytic function",
        "Dense-layer matching curves averaged over seeded runs",
        "Fitted exponential decays vs the alpha monitor vs NaSGD",
        "Per-step loss with equivalent learning rate and alpha",
        "Trajectory of one optimizer on a 2-D function",
        "NaSGD/SGD step-length ratio over a grid",
    };
    std::vector<std::unique_ptr<Flags>> flags;
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        flags.push_back(std::make_unique<Flags>());
        subs.push_back(app.add_subcommand(commands[i].second, blurbs[i]));
        add_flags(subs.back(), commands[i].first, *flags.back());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::size_t which = 0;
    while (which < subs.size() && !subs[which]->parsed()) {
        ++which;
    }
    const TaskKind task = commands[which].first;
    Flags& f = *flags[which];

    try {
        json j = f.config.empty() ? json::object() : load_json_file(f.config);
        if (j.is_object() && j.contains("spec") && j.contains("tool_version")) {
            j = j["spec"];
        }
        if (!j.is_object()) {
            throw ConfigError("config", "top level must be an object");
        }
        for (auto& [opt, apply] : f.appliers) {
            if (opt->count() > 0) {
                apply(j);
            }
        }
        const ExperimentSpec spec = spec_from_json(grid_counts_as_integers(j), task);

        std::filesystem::path out_dir = f.out;
        if (out_dir.empty()) {
            const char* env = std::getenv("NAGD_OUT_DIR");
            out_dir = env != nullptr && *env != '\0' ? env : "nagd_out";
        }
        for (const std::filesystem::path& p : execute(spec, out_dir)) {
            std::cout << p.string() << '\n';
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "nagd: invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "nagd: " << e.what() << '\n';
        return 1;
    }
}

} // namespace nagd
