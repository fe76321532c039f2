#include "nagd/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace nagd {

namespace {

constexpr std::array<std::pair<OptimizerKind, std::string_view>, 8> kKindNames{{
    {OptimizerKind::sgd, "sgd"},
    {OptimizerKind::momentum, "momentum"},
    {OptimizerKind::nasgd, "nasgd"},
    {OptimizerKind::adam, "adam"},
    {OptimizerKind::rmsprop, "rmsprop"},
    {OptimizerKind::adagrad, "adagrad"},
    {OptimizerKind::exp_decay, "exp-decay"},
    {OptimizerKind::alpha_monitor, "alpha-monitor"},
}};

bool finite_vector(const ParamVector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

StepOutcome frozen_outcome(OptimizerState& state, const ParamVector& params, double value,
                           double grad_norm_sq) {
    state.diverged = true;
    StepOutcome out;
    out.new_params = params;
    out.loss_before = value;
    out.grad_norm_sq = grad_norm_sq;
    out.diverged = true;
    return out;
}

// Shared entry checks. Returns true when the step must not proceed.
bool reject_step(OptimizerState& state, const ParamVector& params, double value,
                 const ParamVector& grad, StepOutcome& out) {
    require_same_length(params, grad, "optimizer step");
    if (params.size() != state.dim) {
        throw ContractViolation("optimizer step: parameter length does not match optimizer state");
    }
    if (state.diverged || !std::isfinite(value) || !finite_vector(params) || !finite_vector(grad)) {
        const double gns = finite_vector(grad) ? norm_sq(grad) : std::numeric_limits<double>::quiet_NaN();
        out = frozen_outcome(state, params, value, gns);
        return true;
    }
    return false;
}

// Applies the divergence guard to a candidate update and fills the outcome.
// Returns false (and freezes the state) if the candidate is unusable.
bool accept(OptimizerState& state, const ParamVector& params, ParamVector candidate, double value,
            double grad_norm_sq, StepOutcome& out) {
    if (!all_finite_within(candidate, kDivergenceBound)) {
        out = frozen_outcome(state, params, value, grad_norm_sq);
        return false;
    }
    out.new_params = std::move(candidate);
    out.loss_before = value;
    out.grad_norm_sq = grad_norm_sq;
    ++state.step_count;
    return true;
}

double projected_coefficient(const ParamVector& params, const ParamVector& next, const ParamVector& grad,
                             double grad_norm_sq) {
    if (grad_norm_sq == 0.0) {
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        acc += (params[i] - next[i]) * grad[i];
    }
    return acc / grad_norm_sq;
}

void require(bool ok, const char* message) {
    if (!ok) {
        throw ContractViolation(message);
    }
}

} // namespace

std::string_view to_string(OptimizerKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    if (name == "sgd-momentum") {
        return OptimizerKind::momentum;
    }
    throw ContractViolation("unknown optimizer '" + std::string(name) + "'");
}

OptimizerSpec OptimizerSpec::defaults(OptimizerKind kind) {
    OptimizerSpec spec;
    spec.kind = kind;
    switch (kind) {
    case OptimizerKind::adam:
        spec.hp.eta = 0.001;
        spec.hp.eps = 1e-8;
        break;
    case OptimizerKind::rmsprop:
        spec.hp.eta = 0.001;
        spec.hp.eps = 1e-8;
        break;
    case OptimizerKind::adagrad:
        spec.hp.eta = 0.01;
        spec.hp.eps = 1e-10;
        break;
    case OptimizerKind::alpha_monitor:
        spec.hp.eta = 0.1;
        break;
    default:
        break;
    }
    return spec;
}

OptimizerSpec OptimizerSpec::sgd(double eta, double mu) {
    OptimizerSpec spec = defaults(mu == 0.0 ? OptimizerKind::sgd : OptimizerKind::momentum);
    spec.hp.eta = eta;
    spec.hp.mu = mu;
    return spec;
}

OptimizerSpec OptimizerSpec::nasgd(double alpha, double lower_bound) {
    OptimizerSpec spec = defaults(OptimizerKind::nasgd);
    spec.hp.alpha = alpha;
    spec.hp.lower_bound = lower_bound;
    return spec;
}

OptimizerSpec OptimizerSpec::adam(double eta) {
    OptimizerSpec spec = defaults(OptimizerKind::adam);
    spec.hp.eta = eta;
    return spec;
}

OptimizerSpec OptimizerSpec::rmsprop(double eta) {
    OptimizerSpec spec = defaults(OptimizerKind::rmsprop);
    spec.hp.eta = eta;
    return spec;
}

OptimizerSpec OptimizerSpec::adagrad(double eta) {
    OptimizerSpec spec = defaults(OptimizerKind::adagrad);
    spec.hp.eta = eta;
    return spec;
}

OptimizerSpec OptimizerSpec::exp_decay(double eta0, double base) {
    OptimizerSpec spec = defaults(OptimizerKind::exp_decay);
    spec.hp.eta = eta0;
    spec.hp.decay_base = base;
    return spec;
}

OptimizerSpec OptimizerSpec::alpha_monitor(double eta0) {
    OptimizerSpec spec = defaults(OptimizerKind::alpha_monitor);
    spec.hp.eta = eta0;
    return spec;
}

void OptimizerSpec::validate() const {
    const Hyperparameters& h = hp;
    require(std::isfinite(h.lower_bound), "lower_bound must be finite");
    switch (kind) {
    case OptimizerKind::nasgd:
        require(h.alpha > 0.0 && std::isfinite(h.alpha), "alpha must be finite and positive");
        require(h.clamp > 0.0 && std::isfinite(h.clamp), "clamp must be finite and positive");
        break;
    case OptimizerKind::momentum:
        require(h.mu >= 0.0 && h.mu < 1.0, "mu must lie in [0, 1)");
        [[fallthrough]];
    case OptimizerKind::sgd:
        require(h.eta >= 0.0 && std::isfinite(h.eta), "eta must be finite and nonnegative");
        break;
    case OptimizerKind::adam:
        require(h.beta1 >= 0.0 && h.beta1 < 1.0, "beta1 must lie in [0, 1)");
        require(h.beta2 >= 0.0 && h.beta2 < 1.0, "beta2 must lie in [0, 1)");
        [[fallthrough]];
    case OptimizerKind::adagrad:
        require(h.eps > 0.0, "eps must be positive");
        require(h.eta > 0.0 && std::isfinite(h.eta), "eta must be finite and positive");
        break;
    case OptimizerKind::rmsprop:
        require(h.rho >= 0.0 && h.rho < 1.0, "rho must lie in [0, 1)");
        require(h.eps > 0.0, "eps must be positive");
        require(h.eta > 0.0 && std::isfinite(h.eta), "eta must be finite and positive");
        break;
    case OptimizerKind::exp_decay:
        require(h.eta > 0.0 && std::isfinite(h.eta), "eta must be finite and positive");
        require(h.decay_base > 0.0 && h.decay_base <= 1.0, "decay_base must lie in (0, 1]");
        break;
    case OptimizerKind::alpha_monitor:
        require(h.eta > 0.0 && std::isfinite(h.eta), "eta must be finite and positive");
        require(h.monitor_threshold > 0.0, "monitor_threshold must be positive");
        require(h.monitor_patience >= 1, "monitor_patience must be at least 1");
        require(h.monitor_factor > 0.0 && h.monitor_factor <= 1.0, "monitor_factor must lie in (0, 1]");
        break;
    }
}

std::string OptimizerSpec::label() const {
    std::ostringstream os;
    switch (kind) {
    case OptimizerKind::sgd:
        os << "SGD(eta=" << hp.eta << ")";
        break;
    case OptimizerKind::momentum:
        os << "SGD(eta=" << hp.eta << ",mu=" << hp.mu << ")";
        break;
    case OptimizerKind::nasgd:
        os << "NaSGD(alpha=" << hp.alpha << ")";
        break;
    case OptimizerKind::adam:
        os << "Adam(eta=" << hp.eta << ")";
        break;
    case OptimizerKind::rmsprop:
        os << "RMSprop(eta=" << hp.eta << ")";
        break;
    case OptimizerKind::adagrad:
        os << "Adagrad(eta=" << hp.eta << ")";
        break;
    case OptimizerKind::exp_decay:
        os << "SGD(eta=" << hp.eta << "*" << hp.decay_base << "^t)";
        break;
    case OptimizerKind::alpha_monitor:
        os << "AlphaMonitor(eta0=" << hp.eta << ",threshold=" << hp.monitor_threshold
           << ",patience=" << hp.monitor_patience << ")";
        break;
    }
    return os.str();
}

OptimizerState::OptimizerState(OptimizerSpec s, std::size_t d)
    : spec(s), dim(d), eta(s.hp.eta) {
    spec.validate();
    switch (spec.kind) {
    case OptimizerKind::momentum:
        velocity = ParamVector(dim);
        break;
    case OptimizerKind::adam:
        first_moment = ParamVector(dim);
        second_moment = ParamVector(dim);
        break;
    case OptimizerKind::rmsprop:
    case OptimizerKind::adagrad:
        second_moment = ParamVector(dim);
        break;
    default:
        break;
    }
}

double nasgd_raw_coefficient(double alpha, double value, double lower_bound, double grad_norm_sq) {
    if (grad_norm_sq == 0.0) {
        return 0.0;
    }
    const double gap = std::max(0.0, value - lower_bound);
    return alpha * gap / grad_norm_sq;
}

StepOutcome sgd_step(OptimizerState& state, const ParamVector& params, double value,
                     const ParamVector& grad) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    const double gns = norm_sq(grad);
    if (accept(state, params, axpy(-state.eta, grad, params), value, gns, out)) {
        out.coefficient = state.eta;
    }
    return out;
}

StepOutcome sgd_momentum_step(OptimizerState& state, const ParamVector& params, double value,
                              const ParamVector& grad) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    if (state.velocity.size() != state.dim) {
        state.velocity = ParamVector(state.dim);
    }
    const double mu = state.spec.hp.mu;
    ParamVector velocity(state.dim);
    for (std::size_t i = 0; i < state.dim; ++i) {
        velocity[i] = mu * state.velocity[i] + grad[i];
    }
    const double gns = norm_sq(grad);
    ParamVector next = axpy(-state.eta, velocity, params);
    const double coef = projected_coefficient(params, next, grad, gns);
    if (accept(state, params, std::move(next), value, gns, out)) {
        state.velocity = std::move(velocity);
        out.coefficient = coef;
    }
    return out;
}

StepOutcome nasgd_step(OptimizerState& state, const ParamVector& params, double value,
                       const ParamVector& grad, double lower_bound) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    const double gns = norm_sq(grad);
    const double raw = nasgd_raw_coefficient(state.spec.hp.alpha, value, lower_bound, gns);
    const double cap = state.spec.hp.clamp;
    const double coef = std::min(cap, raw);
    if (accept(state, params, axpy(-coef, grad, params), value, gns, out)) {
        out.coefficient = coef;
        out.clamped = raw > cap;
        out.below_bound = value < lower_bound;
    }
    return out;
}

StepOutcome adam_step(OptimizerState& state, const ParamVector& params, double value,
                      const ParamVector& grad) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    const Hyperparameters& h = state.spec.hp;
    const double t = static_cast<double>(state.step_count + 1);
    const double correction1 = 1.0 - std::pow(h.beta1, t);
    const double correction2 = 1.0 - std::pow(h.beta2, t);
    ParamVector m(state.dim);
    ParamVector v(state.dim);
    ParamVector next(state.dim);
    for (std::size_t i = 0; i < state.dim; ++i) {
        m[i] = h.beta1 * state.first_moment[i] + (1.0 - h.beta1) * grad[i];
        v[i] = h.beta2 * state.second_moment[i] + (1.0 - h.beta2) * grad[i] * grad[i];
        const double m_hat = m[i] / correction1;
        const double v_hat = v[i] / correction2;
        next[i] = params[i] - state.eta * m_hat / (std::sqrt(v_hat) + h.eps);
    }
    const double gns = norm_sq(grad);
    const double coef = projected_coefficient(params, next, grad, gns);
    if (accept(state, params, std::move(next), value, gns, out)) {
        state.first_moment = std::move(m);
        state.second_moment = std::move(v);
        out.coefficient = coef;
    }
    return out;
}

StepOutcome rmsprop_step(OptimizerState& state, const ParamVector& params, double value,
                         const ParamVector& grad) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    const Hyperparameters& h = state.spec.hp;
    ParamVector s(state.dim);
    ParamVector next(state.dim);
    for (std::size_t i = 0; i < state.dim; ++i) {
        s[i] = h.rho * state.second_moment[i] + (1.0 - h.rho) * grad[i] * grad[i];
        next[i] = params[i] - state.eta * grad[i] / (std::sqrt(s[i]) + h.eps);
    }
    const double gns = norm_sq(grad);
    const double coef = projected_coefficient(params, next, grad, gns);
    if (accept(state, params, std::move(next), value, gns, out)) {
        state.second_moment = std::move(s);
        out.coefficient = coef;
    }
    return out;
}

StepOutcome adagrad_step(OptimizerState& state, const ParamVector& params, double value,
                         const ParamVector& grad) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    const Hyperparameters& h = state.spec.hp;
    ParamVector s(state.dim);
    ParamVector next(state.dim);
    for (std::size_t i = 0; i < state.dim; ++i) {
        s[i] = state.second_moment[i] + grad[i] * grad[i];
        next[i] = params[i] - state.eta * grad[i] / (std::sqrt(s[i]) + h.eps);
    }
    const double gns = norm_sq(grad);
    const double coef = projected_coefficient(params, next, grad, gns);
    if (accept(state, params, std::move(next), value, gns, out)) {
        state.second_moment = std::move(s);
        out.coefficient = coef;
    }
    return out;
}

double exp_decay_schedule(double eta0, double base, std::int64_t step) {
    if (!(eta0 > 0.0) || !(base > 0.0 && base <= 1.0) || step < 0) {
        throw ContractViolation("exp_decay_schedule: need eta0 > 0, base in (0, 1], step >= 0");
    }
    return eta0 * std::pow(base, static_cast<double>(step));
}

StepOutcome exp_decay_step(OptimizerState& state, const ParamVector& params, double value,
                           const ParamVector& grad) {
    state.eta = exp_decay_schedule(state.spec.hp.eta, state.spec.hp.decay_base, state.step_count);
    return sgd_step(state, params, value, grad);
}

StepOutcome alpha_monitor_step(OptimizerState& state, const ParamVector& params, double value,
                               const ParamVector& grad) {
    StepOutcome out;
    if (reject_step(state, params, value, grad, out)) {
        return out;
    }
    const Hyperparameters& h = state.spec.hp;
    const double gns = norm_sq(grad);
    const double gap = value - h.lower_bound;
    double equivalent_alpha = 0.0;
    if (gns > 0.0) {
        equivalent_alpha = gap > 0.0 ? state.eta * gns / gap : std::numeric_limits<double>::infinity();
    }
    state.monitor_streak = equivalent_alpha >= h.monitor_threshold ? state.monitor_streak + 1 : 0;
    if (state.monitor_streak >= h.monitor_patience) {
        state.eta *= h.monitor_factor;
        state.monitor_streak = 0;
    }
    return sgd_step(state, params, value, grad);
}

StepOutcome step(OptimizerState& state, const ParamVector& params, double value,
                 const ParamVector& grad) {
    switch (state.spec.kind) {
    case OptimizerKind::sgd:
        return sgd_step(state, params, value, grad);
    case OptimizerKind::momentum:
        return sgd_momentum_step(state, params, value, grad);
    case OptimizerKind::nasgd:
        return nasgd_step(state, params, value, grad, state.spec.hp.lower_bound);
    case OptimizerKind::adam:
        return adam_step(state, params, value, grad);
    case OptimizerKind::rmsprop:
        return rmsprop_step(state, params, value, grad);
    case OptimizerKind::adagrad:
        return adagrad_step(state, params, value, grad);
    case OptimizerKind::exp_decay:
        return exp_decay_step(state, params, value, grad);
    case OptimizerKind::alpha_monitor:
        return alpha_monitor_step(state, params, value, grad);
    }
    throw ContractViolation("step: unknown optimizer kind");
}

} // namespace nagd
