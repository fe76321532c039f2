#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "nagd/numvec.hpp"

namespace nagd {

/// Parameters beyond this magnitude (or non-finite) count as divergence.
inline constexpr double kDivergenceBound = 1e8;

enum class OptimizerKind {
    sgd,
    momentum,
    nasgd,
    adam,
    rmsprop,
    adagrad,
    exp_decay,     // SGD with eta_t = eta * decay_base^t
    alpha_monitor, // SGD that cuts eta when the equivalent alpha stays high
};

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

/// Every scalar any optimizer in the family reads. Only the ones relevant to
/// `OptimizerSpec::kind` are consulted.
struct Hyperparameters {
    double eta = 0.01;
    double alpha = 0.7;
    double mu = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double rho = 0.99; // RMSprop squared-gradient decay
    double decay_base = 1.0;
    double lower_bound = 0.0;
    // NaSGD coefficient cap. Changing it is an advanced option.
    double clamp = 1.0;
    double monitor_threshold = 2.0;
    int monitor_patience = 3;
    double monitor_factor = 1.0 / 3.0;

    friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::sgd;
    Hyperparameters hp;

    static OptimizerSpec defaults(OptimizerKind kind);
    static OptimizerSpec sgd(double eta, double mu = 0.0);
    static OptimizerSpec nasgd(double alpha, double lower_bound = 0.0);
    static OptimizerSpec adam(double eta);
    static OptimizerSpec rmsprop(double eta);
    static OptimizerSpec adagrad(double eta);
    static OptimizerSpec exp_decay(double eta0, double base);
    static OptimizerSpec alpha_monitor(double eta0 = 0.1);

    /// Rejects hyperparameters outside the algorithm's domain.
    void validate() const;

    /// Short human-readable tag, e.g. "NaSGD(alpha=0.7)".
    [[nodiscard]] std::string label() const;

    friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

struct OptimizerState {
    explicit OptimizerState(OptimizerSpec spec, std::size_t dim);

    OptimizerSpec spec;
    std::size_t dim;
    ParamVector velocity;      // momentum
    ParamVector first_moment;  // adam
    ParamVector second_moment; // adam, rmsprop, adagrad accumulator
    double eta;                // current learning rate (monitor and schedules move it)
    std::int64_t step_count = 0;
    int monitor_streak = 0;
    bool diverged = false;
};

struct StepOutcome {
    ParamVector new_params;
    // Scalar multiplying the gradient. For optimizers whose update is not a
    // multiple of the gradient this is <update, grad> / |grad|^2.
    double coefficient = 0.0;
    double loss_before = 0.0;
    double grad_norm_sq = 0.0;
    bool clamped = false;
    bool below_bound = false; // NaSGD saw value < L and took a null step
    bool diverged = false;
};

/// Uncapped NaSGD coefficient alpha * max(0, value - L) / |grad|^2, or 0 for a
/// zero gradient.
double nasgd_raw_coefficient(double alpha, double value, double lower_bound, double grad_norm_sq);

StepOutcome sgd_step(OptimizerState& state, const ParamVector& params, double value,
                     const ParamVector& grad);
StepOutcome sgd_momentum_step(OptimizerState& state, const ParamVector& params, double value,
                              const ParamVector& grad);
StepOutcome nasgd_step(OptimizerState& state, const ParamVector& params, double value,
                       const ParamVector& grad, double lower_bound);
StepOutcome adam_step(OptimizerState& state, const ParamVector& params, double value,
                      const ParamVector& grad);
StepOutcome rmsprop_step(OptimizerState& state, const ParamVector& params, double value,
                         const ParamVector& grad);
StepOutcome adagrad_step(OptimizerState& state, const ParamVector& params, double value,
                         const ParamVector& grad);
StepOutcome exp_decay_step(OptimizerState& state, const ParamVector& params, double value,
                           const ParamVector& grad);
StepOutcome alpha_monitor_step(OptimizerState& state, const ParamVector& params, double value,
                               const ParamVector& grad);

/// Dispatches on `state.spec.kind`; NaSGD reads its bound from the spec.
StepOutcome step(OptimizerState& state, const ParamVector& params, double value,
                 const ParamVector& grad);

/// eta0 * base^step.
double exp_decay_schedule(double eta0, double base, std::int64_t step);

} // namespace nagd
