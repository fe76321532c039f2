#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nagd/numvec.hpp"
#include "nagd/objective.hpp"
#include "nagd/optim.hpp"

namespace nagd {

/// Translation of one step into the other algorithm's hyperparameter.
struct RosettaRecord {
    std::int64_t step = 0;
    double equivalent_eta = 0.0;
    std::optional<double> equivalent_alpha; // empty when value <= L or grad = 0
    double loss = 0.0;
};

/// The NaSGD alpha that reproduces an SGD step of size `eta` from the same
/// point: eta * |grad|^2 / (value - L). Empty when value <= L or the gradient
/// vanishes. The result is nudged by a few ulps, when that helps, so that
/// nasgd_raw_coefficient(alpha, ...) returns `eta` exactly.
std::optional<double> equivalent_alpha(double eta, double value, double grad_norm_sq, double lower_bound);

/// Values above this ask for more than a 100% loss decrease.
inline constexpr double kOverambitiousAlpha = 2.0;

inline bool is_overambitious(double alpha) { return alpha > kOverambitiousAlpha; }

/// The SGD learning rate that reproduces a step: its gradient coefficient.
inline double equivalent_eta(const StepOutcome& outcome) { return outcome.coefficient; }

RosettaRecord make_rosetta_record(std::int64_t step, const StepOutcome& outcome, double lower_bound);

/// First-order prediction of f(theta - eta*grad): value - eta*|grad|^2.
inline double first_order_estimate(double value, double grad_norm_sq, double eta) {
    return value - eta * grad_norm_sq;
}

/// Inclusive evenly spaced axis; a single point sits at `min`.
struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 1;

    [[nodiscard]] double at(std::size_t i) const;
};

struct FieldRatio {
    double x = 0.0;
    double y = 0.0;
    // NaSGD field length over SGD field length; > 1 where NaSGD is faster.
    // +inf where the gradient vanishes.
    double ratio = 0.0;
};

/// Ratio of alpha_star*(f - L)/|grad f| to eta_star*|grad f| over a 2-D grid,
/// row-major in x then y.
std::vector<FieldRatio> field_ratio_grid(const Objective& obj, const GridAxis& xs, const GridAxis& ys,
                                         double eta_star, double alpha_star);

struct Trace {
    std::vector<ParamVector> points; // includes the start point
    std::vector<double> values;      // objective value at each point
    bool diverged = false;
};

/// Iterates `spec` from `start` for up to `n_steps` updates.
Trace trajectory_trace(const Objective& obj, const OptimizerSpec& spec, const ParamVector& start,
                       std::int64_t n_steps);

/// Largest distance from any point of `points` to the polyline through `path`.
double max_distance_to_polyline(const std::vector<ParamVector>& points, const std::vector<ParamVector>& path);

} // namespace nagd
