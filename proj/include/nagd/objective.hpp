#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "nagd/numvec.hpp"

namespace nagd {

struct Evaluation {
    double value = 0.0;
    ParamVector gradient;
};

/// A deterministic differentiable function with a known lower bound.
///
/// Evaluators must be pure and reentrant; one call returns both the value
/// and the gradient since every optimizer in this library needs both.
class Objective {
public:
    using Evaluator = std::function<Evaluation(const ParamVector&)>;

    Objective(std::string name, std::size_t dim, Evaluator evaluator, double lower_bound = 0.0);

    [[nodiscard]] Evaluation evaluate(const ParamVector& p) const;
    [[nodiscard]] double value(const ParamVector& p) const { return evaluate(p).value; }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double lower_bound() const noexcept { return lower_bound_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
    std::size_t dim_;
    Evaluator evaluator_;
    double lower_bound_;
};

/// q(x, y) = 8x^2 + y^2/2.
Evaluation eval_q(const ParamVector& p);

/// r(x, y) = (1 - x)^2 + 100(y - x^2)^2.
Evaluation eval_rosenbrock(const ParamVector& p);

Objective make_quadratic();
Objective make_rosenbrock();

/// Looks up "q" / "quadratic" or "r" / "rosenbrock".
Objective objective_by_name(std::string_view name);

/// k*f with gradient k*grad f and lower bound k*L. Requires finite k > 0.
Objective scaled(const Objective& base, double k);

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h per coordinate.
ParamVector finite_diff_grad(const Objective& obj, const ParamVector& p, double h);

} // namespace nagd
