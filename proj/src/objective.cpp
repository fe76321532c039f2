#include "nagd/objective.hpp"

#include <cmath>
#include <utility>

namespace nagd {

Objective::Objective(std::string name, std::size_t dim, Evaluator evaluator, double lower_bound)
    : name_(std::move(name)), dim_(dim), evaluator_(std::move(evaluator)), lower_bound_(lower_bound) {}

Evaluation Objective::evaluate(const ParamVector& p) const {
    if (p.size() != dim_) {
        throw ContractViolation(name_ + ": expected " + std::to_string(dim_) + " parameters, got " +
                                std::to_string(p.size()));
    }
    return evaluator_(p);
}

namespace {

void require_2d(const ParamVector& p, const char* name) {
    if (p.size() != 2) {
        throw ContractViolation(std::string(name) + ": expected a 2-vector, got length " +
                                std::to_string(p.size()));
    }
}

} // namespace

Evaluation eval_q(const ParamVector& p) {
    require_2d(p, "q");
    const double x = p[0];
    const double y = p[1];
    return {8.0 * x * x + 0.5 * y * y, ParamVector{16.0 * x, y}};
}

Evaluation eval_rosenbrock(const ParamVector& p) {
    require_2d(p, "rosenbrock");
    const double x = p[0];
    const double y = p[1];
    const double valley = y - x * x;
    const double value = (1.0 - x) * (1.0 - x) + 100.0 * valley * valley;
    return {value, ParamVector{-2.0 * (1.0 - x) - 400.0 * x * valley, 200.0 * valley}};
}

Objective make_quadratic() { return Objective("q", 2, eval_q); }

Objective make_rosenbrock() { return Objective("rosenbrock", 2, eval_rosenbrock); }

Objective objective_by_name(std::string_view name) {
    if (name == "q" || name == "quadratic") {
        return make_quadratic();
    }
    if (name == "r" || name == "rosenbrock") {
        return make_rosenbrock();
    }
    throw ContractViolation("unknown objective '" + std::string(name) + "'");
}

Objective scaled(const Objective& base, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw ContractViolation("scaled: factor must be finite and positive");
    }
    auto evaluator = [base, k](const ParamVector& p) {
        Evaluation e = base.evaluate(p);
        return Evaluation{k * e.value, scale(k, e.gradient)};
    };
    return Objective(base.name(), base.dim(), std::move(evaluator), k * base.lower_bound());
}

ParamVector finite_diff_grad(const Objective& obj, const ParamVector& p, double h) {
    if (!(h > 0.0)) {
        throw ContractViolation("finite_diff_grad: step must be positive");
    }
    ParamVector grad(p.size());
    ParamVector probe = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
        probe[i] = p[i] + h;
        const double up = obj.value(probe);
        probe[i] = p[i] - h;
        const double down = obj.value(probe);
        probe[i] = p[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

} // namespace nagd
