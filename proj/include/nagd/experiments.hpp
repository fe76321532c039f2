#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nagd/diagnostics.hpp"
#include "nagd/nn.hpp"
#include "nagd/objective.hpp"
#include "nagd/optim.hpp"

namespace nagd {

/// An experiment description that cannot run; `field()` names the culprit.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class TaskKind { function_race, layer_match, hybrid, rosetta_trace, trace, field_grid };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

/// How per-run test distances are combined into one curve point.
enum class CurveAggregation {
    mean_log10, // mean over runs of log10(distance)
    log10_mean, // log10 of the mean distance
};

std::string_view to_string(CurveAggregation a);
CurveAggregation parse_aggregation(std::string_view name);

struct SampledAlpha {
    double lo = 0.2;
    double hi = 2.0;
    int trials = 2000;

    friend bool operator==(const SampledAlpha&, const SampledAlpha&) = default;
};

/// Declarative description of one experiment. Fields irrelevant to `task`
/// are ignored.
struct ExperimentSpec {
    TaskKind task = TaskKind::function_race;

    // Analytic-function tasks.
    std::string function = "q";
    std::vector<double> start{1.0, 1.0};
    std::vector<double> thresholds;

    std::vector<OptimizerSpec> optimizers;
    std::optional<SampledAlpha> sampled_alpha; // NaSGD with alpha ~ U[lo, hi)

    std::int64_t max_steps = 100000;
    int n_runs = 1;
    std::uint64_t base_seed = 0;
    int record_every = 10;

    // Layer matching.
    LossKind loss = LossKind::distance;
    CurveAggregation aggregation = CurveAggregation::mean_log10;
    std::vector<int> decay_windows{1500, 600, 200};
    double hybrid_alpha = 0.7;

    // Field grid.
    GridAxis grid_x{-1.0, 1.0, 21};
    GridAxis grid_y{-1.0, 1.0, 21};
    double eta_star = 0.1156;
    double alpha_star = 1.9;

    // 0 = hardware concurrency. Results never depend on it.
    unsigned threads = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Threshold races on analytic functions.

struct RaceResult {
    std::vector<double> thresholds;
    // First update index i with f(theta_i) <= threshold; empty if never.
    std::vector<std::optional<std::int64_t>> steps_to_threshold;
    bool diverged = false;
    std::int64_t steps_taken = 0;
    double wall_time_ms = 0.0; // informational
};

/// Runs `opt` from `start`. theta_0 has index 0 and each update adds one;
/// the thresholds are checked after every update.
RaceResult race(const Objective& obj, const OptimizerSpec& opt, const ParamVector& start,
                std::span<const double> thresholds, std::int64_t max_steps);

RaceResult run_race(const ExperimentSpec& spec, const OptimizerSpec& opt);

struct SampledRaceResult {
    SampledAlpha sampling;
    std::vector<double> thresholds;
    // Mean step index over non-diverged trials that reached each threshold.
    std::vector<std::optional<double>> mean_steps;
    std::vector<int> reached;
    int diverged = 0;
    std::vector<double> alphas; // the draws, in trial order
};

/// NaSGD races with alpha drawn uniformly from [lo, hi), seeded by
/// spec.base_seed.
SampledRaceResult run_sampled_alpha(const ExperimentSpec& spec, const SampledAlpha& sampling);

// ---------------------------------------------------------------------------
// Dense layer matching.

struct LayerRun {
    std::vector<std::int64_t> steps; // recorded step indices (1-based update count)
    std::vector<double> distance;    // test avg_distance after that update
    std::vector<double> equivalent_eta;
    std::vector<std::optional<double>> equivalent_alpha;
    std::vector<double> loss; // minibatch loss before that update
    bool diverged = false;
    std::int64_t diverged_at = -1;
};

/// Trains a fresh student for task seed `seed` with minibatches of one,
/// reshuffling the training split every epoch, recording every
/// `record_every` updates.
LayerRun train_layer_run(const OptimizerSpec& opt, std::uint64_t seed, std::int64_t total_steps,
                         int record_every, LossKind loss);

struct LayerCurve {
    std::string label;
    std::vector<std::int64_t> steps;
    std::vector<double> log10_distance;
    std::vector<double> mean_equivalent_eta;
    std::vector<double> mean_equivalent_alpha; // NaN where no run defines it
    std::vector<int> n_active_runs;
    int n_diverged = 0;
};

/// Combines runs point by point. A diverged run stops contributing from the
/// first recorded step after it diverged.
LayerCurve aggregate_runs(std::span<const LayerRun> runs, CurveAggregation aggregation);

/// Runs seeds base_seed .. base_seed + n_runs - 1 (in parallel when allowed).
std::vector<LayerRun> run_layer_runs(const ExperimentSpec& spec, const OptimizerSpec& opt,
                                     std::int64_t total_steps, int record_every);

LayerCurve run_layer_match(const ExperimentSpec& spec, const OptimizerSpec& opt);

struct DecayFit {
    double eta0 = 0.0;
    double base = 1.0;
    int window = 0;
    int excluded = 0; // nonpositive points dropped from the window
};

/// Least-squares line through log(eta_k) against k over the first `window`
/// points; eta0 = exp(intercept), base = exp(slope).
DecayFit fit_equivalent_eta_decay(std::span<const double> curve, int window);

struct HybridSeries {
    std::string label;
    OptimizerSpec optimizer;
    LayerCurve curve; // mean_equivalent_eta doubles as the mean learning rate
};

struct HybridResult {
    std::vector<DecayFit> fits;
    std::vector<HybridSeries> series; // decay schedules, alpha monitor, NaSGD
};

/// Fits exponential schedules to NaSGD(hybrid_alpha)'s mean equivalent
/// learning rate and races them against the alpha monitor and NaSGD itself.
HybridResult run_hybrid_comparison(const ExperimentSpec& spec);

std::string decay_label(int window);

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn);

} // namespace nagd
