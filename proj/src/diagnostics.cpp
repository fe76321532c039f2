#include "nagd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nagd {

std::optional<double> equivalent_alpha(double eta, double value, double grad_norm_sq, double lower_bound) {
    const double gap = value - lower_bound;
    if (!(gap > 0.0) || !(grad_norm_sq > 0.0)) {
        return std::nullopt;
    }
    const double direct = eta * grad_norm_sq / gap;
    if (!std::isfinite(direct) || direct == 0.0) {
        return direct;
    }

    // Four roundings separate eta from the coefficient NaSGD recomputes from
    // `direct`; search the neighbouring doubles for one that lands on eta.
    constexpr int kSearchUlps = 16;
    double best = direct;
    double best_err = std::fabs(nasgd_raw_coefficient(direct, value, lower_bound, grad_norm_sq) - eta);
    double below = direct;
    double above = direct;
    for (int k = 1; k <= kSearchUlps && best_err != 0.0; ++k) {
        below = std::nextafter(below, 0.0);
        above = std::nextafter(above, std::numeric_limits<double>::infinity());
        for (double candidate : {below, above}) {
            const double err = std::fabs(nasgd_raw_coefficient(candidate, value, lower_bound, grad_norm_sq) - eta);
            if (err < best_err) {
                best = candidate;
                best_err = err;
            }
        }
    }
    return best;
}

RosettaRecord make_rosetta_record(std::int64_t step, const StepOutcome& outcome, double lower_bound) {
    RosettaRecord rec;
    rec.step = step;
    rec.equivalent_eta = equivalent_eta(outcome);
    rec.equivalent_alpha = equivalent_alpha(outcome.coefficient, outcome.loss_before, outcome.grad_norm_sq,
                                            lower_bound);
    rec.loss = outcome.loss_before;
    return rec;
}

double GridAxis::at(std::size_t i) const {
    if (count <= 1) {
        return min;
    }
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<FieldRatio> field_ratio_grid(const Objective& obj, const GridAxis& xs, const GridAxis& ys,
                                         double eta_star, double alpha_star) {
    if (obj.dim() != 2) {
        throw ContractViolation("field_ratio_grid: objective must be 2-dimensional");
    }
    if (xs.count == 0 || ys.count == 0 || !std::isfinite(xs.min) || !std::isfinite(xs.max) ||
        !std::isfinite(ys.min) || !std::isfinite(ys.max)) {
        throw ContractViolation("field_ratio_grid: grid axes must be finite and nonempty");
    }
    if (!(eta_star > 0.0) || !(alpha_star > 0.0)) {
        throw ContractViolation("field_ratio_grid: eta_star and alpha_star must be positive");
    }
    std::vector<FieldRatio> out;
    out.reserve(xs.count * ys.count);
    for (std::size_t i = 0; i < xs.count; ++i) {
        for (std::size_t j = 0; j < ys.count; ++j) {
            const double x = xs.at(i);
            const double y = ys.at(j);
            const Evaluation e = obj.evaluate(ParamVector{x, y});
            const double gnorm = norm(e.gradient);
            double ratio = std::numeric_limits<double>::infinity();
            if (gnorm > 0.0) {
                const double sgd_length = eta_star * gnorm;
                const double na_length = alpha_star * std::max(0.0, e.value - obj.lower_bound()) / gnorm;
                ratio = na_length / sgd_length;
            }
            out.push_back({x, y, ratio});
        }
    }
    return out;
}

Trace trajectory_trace(const Objective& obj, const OptimizerSpec& spec, const ParamVector& start,
                       std::int64_t n_steps) {
    if (n_steps < 0) {
        throw ContractViolation("trajectory_trace: n_steps must be nonnegative");
    }
    OptimizerState state(spec, obj.dim());
    Trace trace;
    trace.points.push_back(start);
    Evaluation e = obj.evaluate(start);
    trace.values.push_back(e.value);
    ParamVector params = start;
    for (std::int64_t i = 0; i < n_steps; ++i) {
        const StepOutcome out = step(state, params, e.value, e.gradient);
        if (out.diverged) {
            trace.diverged = true;
            break;
        }
        params = out.new_params;
        e = obj.evaluate(params);
        if (!std::isfinite(e.value)) {
            trace.diverged = true;
            break;
        }
        trace.points.push_back(params);
        trace.values.push_back(e.value);
    }
    return trace;
}

namespace {

double distance_to_segment(const ParamVector& p, const ParamVector& a, const ParamVector& b) {
    double ab_sq = 0.0;
    double ap_ab = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double ab = b[i] - a[i];
        ab_sq += ab * ab;
        ap_ab += (p[i] - a[i]) * ab;
    }
    const double t = ab_sq > 0.0 ? std::clamp(ap_ab / ab_sq, 0.0, 1.0) : 0.0;
    double d_sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i] - (a[i] + t * (b[i] - a[i]));
        d_sq += diff * diff;
    }
    return std::sqrt(d_sq);
}

} // namespace

double max_distance_to_polyline(const std::vector<ParamVector>& points, const std::vector<ParamVector>& path) {
    if (path.empty()) {
        throw ContractViolation("max_distance_to_polyline: empty path");
    }
    double worst = 0.0;
    for (const ParamVector& p : points) {
        double best = distance_to_segment(p, path.front(), path.front());
        for (std::size_t k = 1; k < path.size() && best > 0.0; ++k) {
            best = std::min(best, distance_to_segment(p, path[k - 1], path[k]));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace nagd
