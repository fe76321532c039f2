#include "nagd/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "nagd/random.hpp"

namespace nagd {

namespace {

constexpr std::array<std::pair<TaskKind, std::string_view>, 6> kTaskNames{{
    {TaskKind::function_race, "function-race"},
    {TaskKind::layer_match, "layer-match"},
    {TaskKind::hybrid, "hybrid"},
    {TaskKind::rosetta_trace, "rosetta-trace"},
    {TaskKind::trace, "trace"},
    {TaskKind::field_grid, "field-grid"},
}};

// Stream ids keep the independent random sequences of one seed apart.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kAlphaSampleStream = 2;

} // namespace

std::string_view to_string(TaskKind kind) {
    for (const auto& [k, name] : kTaskNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
    for (const auto& [k, n] : kTaskNames) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("task", "unknown task '" + std::string(name) + "'");
}

std::string_view to_string(CurveAggregation a) {
    return a == CurveAggregation::mean_log10 ? "mean-log10" : "log10-mean";
}

CurveAggregation parse_aggregation(std::string_view name) {
    if (name == "mean-log10") {
        return CurveAggregation::mean_log10;
    }
    if (name == "log10-mean") {
        return CurveAggregation::log10_mean;
    }
    throw ConfigError("aggregation", "expected 'mean-log10' or 'log10-mean'");
}

void ExperimentSpec::validate() const {
    if (max_steps < 0 || (max_steps < 1 && task != TaskKind::trace)) {
        throw ConfigError("max_steps", "must be at least 1");
    }
    if (n_runs < 1) {
        throw ConfigError("n_runs", "must be at least 1");
    }
    if (record_every < 1) {
        throw ConfigError("record_every", "must be at least 1");
    }
    const bool needs_optimizer = task != TaskKind::field_grid && task != TaskKind::hybrid;
    if (needs_optimizer && optimizers.empty() && !(task == TaskKind::function_race && sampled_alpha)) {
        throw ConfigError("optimizers", "at least one optimizer is required");
    }
    for (std::size_t i = 0; i < optimizers.size(); ++i) {
        try {
            optimizers[i].validate();
        } catch (const ContractViolation& e) {
            throw ConfigError("optimizers[" + std::to_string(i) + "]", e.what());
        }
    }
    if (task == TaskKind::function_race || task == TaskKind::trace || task == TaskKind::field_grid) {
        try {
            (void)objective_by_name(function);
        } catch (const ContractViolation& e) {
            throw ConfigError("function", e.what());
        }
    }
    if (task == TaskKind::function_race || task == TaskKind::trace) {
        if (start.size() != 2 || !std::all_of(start.begin(), start.end(), [](double v) { return std::isfinite(v); })) {
            throw ConfigError("start", "must be two finite numbers");
        }
    }
    if (task == TaskKind::function_race) {
        if (thresholds.empty()) {
            throw ConfigError("thresholds", "must not be empty");
        }
        for (std::size_t i = 1; i < thresholds.size(); ++i) {
            if (!(thresholds[i] < thresholds[i - 1])) {
                throw ConfigError("thresholds", "must be strictly descending");
            }
        }
        if (sampled_alpha) {
            if (!(sampled_alpha->lo < sampled_alpha->hi) || !(sampled_alpha->lo > 0.0)) {
                throw ConfigError("sampled_alpha", "need 0 < lo < hi");
            }
            if (sampled_alpha->trials < 1) {
                throw ConfigError("sampled_alpha.trials", "must be at least 1");
            }
        }
    }
    if (task == TaskKind::hybrid) {
        if (decay_windows.empty()) {
            throw ConfigError("decay_windows", "must not be empty");
        }
        for (int w : decay_windows) {
            if (w < 2) {
                throw ConfigError("decay_windows", "each window needs at least 2 steps");
            }
        }
        if (!(hybrid_alpha > 0.0)) {
            throw ConfigError("hybrid_alpha", "must be positive");
        }
    }
    if (task == TaskKind::field_grid) {
        if (grid_x.count < 1 || grid_y.count < 1) {
            throw ConfigError("grid", "each axis needs at least one point");
        }
        if (!(eta_star > 0.0) || !(alpha_star > 0.0)) {
            throw ConfigError("eta_star", "eta_star and alpha_star must be positive");
        }
    }
}

// ---------------------------------------------------------------------------

RaceResult race(const Objective& obj, const OptimizerSpec& opt, const ParamVector& start,
                std::span<const double> thresholds, std::int64_t max_steps) {
    const auto t0 = std::chrono::steady_clock::now();
    RaceResult result;
    result.thresholds.assign(thresholds.begin(), thresholds.end());
    result.steps_to_threshold.assign(thresholds.size(), std::nullopt);

    OptimizerState state(opt, obj.dim());
    ParamVector params = start;
    Evaluation e = obj.evaluate(params);
    std::size_t next = 0;
    auto mark = [&](std::int64_t index) {
        while (next < thresholds.size() && e.value <= thresholds[next]) {
            result.steps_to_threshold[next++] = index;
        }
    };
    mark(0);
    for (std::int64_t i = 1; i <= max_steps && next < thresholds.size(); ++i) {
        StepOutcome out = step(state, params, e.value, e.gradient);
        if (out.diverged) {
            result.diverged = true;
            break;
        }
        params = std::move(out.new_params);
        e = obj.evaluate(params);
        result.steps_taken = i;
        if (!std::isfinite(e.value)) {
            result.diverged = true;
            break;
        }
        mark(i);
    }
    result.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

RaceResult run_race(const ExperimentSpec& spec, const OptimizerSpec& opt) {
    if (spec.task != TaskKind::function_race) {
        throw ConfigError("task", "run_race needs a function-race spec");
    }
    const Objective obj = objective_by_name(spec.function);
    return race(obj, opt, ParamVector(spec.start), spec.thresholds, spec.max_steps);
}

SampledRaceResult run_sampled_alpha(const ExperimentSpec& spec, const SampledAlpha& sampling) {
    if (!(sampling.lo < sampling.hi)) {
        throw ContractViolation("run_sampled_alpha: need lo < hi");
    }
    if (sampling.trials < 1) {
        throw ContractViolation("run_sampled_alpha: need at least one trial");
    }
    const Objective obj = objective_by_name(spec.function);
    const ParamVector start(spec.start);
    // Start from the configured NaSGD spec (for L and clamp) when there is one.
    OptimizerSpec base = OptimizerSpec::nasgd(1.0);
    for (const OptimizerSpec& o : spec.optimizers) {
        if (o.kind == OptimizerKind::nasgd) {
            base = o;
            break;
        }
    }

    SampledRaceResult result;
    result.sampling = sampling;
    result.thresholds = spec.thresholds;
    Rng rng(spec.base_seed, kAlphaSampleStream);
    result.alphas.resize(static_cast<std::size_t>(sampling.trials));
    for (double& a : result.alphas) {
        a = rng.uniform(sampling.lo, sampling.hi);
    }

    std::vector<RaceResult> races(result.alphas.size());
    parallel_for(sampling.trials, spec.threads, [&](int i) {
        OptimizerSpec opt = base;
        opt.hp.alpha = result.alphas[static_cast<std::size_t>(i)];
        races[static_cast<std::size_t>(i)] = race(obj, opt, start, spec.thresholds, spec.max_steps);
    });

    const std::size_t nt = spec.thresholds.size();
    std::vector<double> sums(nt, 0.0);
    result.reached.assign(nt, 0);
    for (const RaceResult& r : races) {
        if (r.diverged) {
            ++result.diverged;
            continue;
        }
        for (std::size_t k = 0; k < nt; ++k) {
            if (r.steps_to_threshold[k]) {
                sums[k] += static_cast<double>(*r.steps_to_threshold[k]);
                ++result.reached[k];
            }
        }
    }
    result.mean_steps.assign(nt, std::nullopt);
    for (std::size_t k = 0; k < nt; ++k) {
        if (result.reached[k] > 0) {
            result.mean_steps[k] = sums[k] / result.reached[k];
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

LayerRun train_layer_run(const OptimizerSpec& opt, std::uint64_t seed, std::int64_t total_steps,
                         int record_every, LossKind loss) {
    if (record_every < 1) {
        throw ContractViolation("train_layer_run: record_every must be positive");
    }
    const MatchingTask task = generate_task(seed);
    DenseLayer layer(kMatchInputs, kMatchOutputs, task.student_init);
    OptimizerState state(opt, layer.param_count());
    Rng shuffler(seed, kShuffleStream);

    std::vector<std::size_t> order(task.data.train.size());
    LayerRun run;
    std::int64_t t = 0;
    while (t < total_steps && !run.diverged) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        shuffler.shuffle(std::span<std::size_t>(order));
        for (std::size_t idx : order) {
            if (t >= total_steps) {
                break;
            }
            const Evaluation e = loss_and_grad(layer, std::span(&task.data.train[idx], 1), loss);
            StepOutcome out = step(state, layer.params(), e.value, e.gradient);
            ++t;
            if (out.diverged) {
                run.diverged = true;
                run.diverged_at = t;
                break;
            }
            layer.set_params(std::move(out.new_params));
            if (t % record_every == 0) {
                run.steps.push_back(t);
                run.distance.push_back(avg_distance(layer, task.data.test));
                run.equivalent_eta.push_back(equivalent_eta(out));
                run.equivalent_alpha.push_back(
                    equivalent_alpha(out.coefficient, out.loss_before, out.grad_norm_sq, 0.0));
                run.loss.push_back(out.loss_before);
            }
        }
    }
    return run;
}

LayerCurve aggregate_runs(std::span<const LayerRun> runs, CurveAggregation aggregation) {
    LayerCurve curve;
    std::size_t points = 0;
    for (const LayerRun& r : runs) {
        points = std::max(points, r.steps.size());
        curve.n_diverged += r.diverged ? 1 : 0;
    }
    const LayerRun* longest = nullptr;
    for (const LayerRun& r : runs) {
        if (r.steps.size() == points) {
            longest = &r;
            break;
        }
    }
    constexpr double kFloor = std::numeric_limits<double>::min();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < points; ++k) {
        double dist_acc = 0.0;
        double eta_acc = 0.0;
        double alpha_acc = 0.0;
        int active = 0;
        int alpha_count = 0;
        for (const LayerRun& r : runs) {
            if (k >= r.steps.size()) {
                continue;
            }
            ++active;
            const double d = std::max(r.distance[k], kFloor);
            dist_acc += aggregation == CurveAggregation::mean_log10 ? std::log10(d) : d;
            eta_acc += r.equivalent_eta[k];
            if (r.equivalent_alpha[k]) {
                alpha_acc += *r.equivalent_alpha[k];
                ++alpha_count;
            }
        }
        curve.steps.push_back(longest->steps[k]);
        const double mean_dist = dist_acc / active;
        curve.log10_distance.push_back(aggregation == CurveAggregation::mean_log10 ? mean_dist
                                                                                   : std::log10(std::max(mean_dist, kFloor)));
        curve.mean_equivalent_eta.push_back(eta_acc / active);
        curve.mean_equivalent_alpha.push_back(alpha_count > 0 ? alpha_acc / alpha_count : nan);
        curve.n_active_runs.push_back(active);
    }
    return curve;
}

std::vector<LayerRun> run_layer_runs(const ExperimentSpec& spec, const OptimizerSpec& opt,
                                     std::int64_t total_steps, int record_every) {
    std::vector<LayerRun> runs(static_cast<std::size_t>(spec.n_runs));
    parallel_for(spec.n_runs, spec.threads, [&](int i) {
        runs[static_cast<std::size_t>(i)] =
            train_layer_run(opt, spec.base_seed + static_cast<std::uint64_t>(i), total_steps, record_every, spec.loss);
    });
    return runs;
}

LayerCurve run_layer_match(const ExperimentSpec& spec, const OptimizerSpec& opt) {
    const std::vector<LayerRun> runs = run_layer_runs(spec, opt, spec.max_steps, spec.record_every);
    LayerCurve curve = aggregate_runs(runs, spec.aggregation);
    curve.label = opt.label();
    return curve;
}

DecayFit fit_equivalent_eta_decay(std::span<const double> curve, int window) {
    if (window < 2 || static_cast<std::size_t>(window) > curve.size()) {
        throw ContractViolation("fit_equivalent_eta_decay: window must lie in [2, curve length]");
    }
    DecayFit fit;
    fit.window = window;
    std::vector<double> ks;
    std::vector<double> logs;
    for (int k = 0; k < window; ++k) {
        const double v = curve[static_cast<std::size_t>(k)];
        if (v > 0.0 && std::isfinite(v)) {
            ks.push_back(k);
            logs.push_back(std::log(v));
        } else {
            ++fit.excluded;
        }
    }
    if (ks.size() < 2) {
        throw ContractViolation("fit_equivalent_eta_decay: fewer than two positive points in window");
    }
    const double n = static_cast<double>(ks.size());
    double k_mean = 0.0;
    double l_mean = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        k_mean += ks[i];
        l_mean += logs[i];
    }
    k_mean /= n;
    l_mean /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        sxy += (ks[i] - k_mean) * (logs[i] - l_mean);
        sxx += (ks[i] - k_mean) * (ks[i] - k_mean);
    }
    const double slope = sxy / sxx;
    fit.base = std::exp(slope);
    fit.eta0 = std::exp(l_mean - slope * k_mean);
    return fit;
}

std::string decay_label(int window) {
    switch (window) {
    case 1500:
        return "decay028";
    case 600:
        return "decay052";
    case 200:
        return "decay090";
    default:
        return "decay_w" + std::to_string(window);
    }
}

HybridResult run_hybrid_comparison(const ExperimentSpec& spec) {
    const int widest = *std::max_element(spec.decay_windows.begin(), spec.decay_windows.end());
    const std::int64_t steps = spec.max_steps;
    const std::int64_t fit_steps = std::max<std::int64_t>(steps, widest);

    HybridResult result;
    const OptimizerSpec nasgd = OptimizerSpec::nasgd(spec.hybrid_alpha);

    // NaSGD is recorded at every step for the fit, then thinned to the
    // configured cadence for its own series.
    const std::vector<LayerRun> na_runs = run_layer_runs(spec, nasgd, fit_steps, 1);
    const LayerCurve na_dense = aggregate_runs(na_runs, spec.aggregation);
    for (int w : spec.decay_windows) {
        if (static_cast<std::size_t>(w) > na_dense.mean_equivalent_eta.size()) {
            throw ConfigError("decay_windows", "window longer than the NaSGD reference run");
        }
        result.fits.push_back(fit_equivalent_eta_decay(na_dense.mean_equivalent_eta, w));
    }

    for (const DecayFit& fit : result.fits) {
        HybridSeries s;
        s.label = decay_label(fit.window);
        s.optimizer = OptimizerSpec::exp_decay(fit.eta0, std::min(fit.base, 1.0));
        s.curve = aggregate_runs(run_layer_runs(spec, s.optimizer, steps, spec.record_every), spec.aggregation);
        s.curve.label = s.label;
        result.series.push_back(std::move(s));
    }

    OptimizerSpec monitor = OptimizerSpec::alpha_monitor(0.1);
    for (const OptimizerSpec& o : spec.optimizers) {
        if (o.kind == OptimizerKind::alpha_monitor) {
            monitor = o;
        }
    }
    HybridSeries m;
    m.label = "alpha100";
    m.optimizer = monitor;
    m.curve = aggregate_runs(run_layer_runs(spec, monitor, steps, spec.record_every), spec.aggregation);
    m.curve.label = m.label;
    result.series.push_back(std::move(m));

    HybridSeries g;
    g.label = "gna" + std::to_string(static_cast<int>(std::lround(spec.hybrid_alpha * 100.0)));
    if (g.label.size() < 6) {
        g.label.insert(3, 6 - g.label.size(), '0');
    }
    g.optimizer = nasgd;
    LayerCurve thinned;
    for (std::size_t k = 0; k < na_dense.steps.size(); ++k) {
        const std::int64_t t = na_dense.steps[k];
        if (t > steps || t % spec.record_every != 0) {
            continue;
        }
        thinned.steps.push_back(t);
        thinned.log10_distance.push_back(na_dense.log10_distance[k]);
        thinned.mean_equivalent_eta.push_back(na_dense.mean_equivalent_eta[k]);
        thinned.mean_equivalent_alpha.push_back(na_dense.mean_equivalent_alpha[k]);
        thinned.n_active_runs.push_back(na_dense.n_active_runs[k]);
    }
    thinned.n_diverged = na_dense.n_diverged;
    thinned.label = g.label;
    g.curve = std::move(thinned);
    result.series.push_back(std::move(g));
    return result;
}

void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn) {
    if (n <= 0) {
        return;
    }
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace nagd
