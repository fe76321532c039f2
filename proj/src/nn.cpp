#include "nagd/nn.hpp"

#include <cmath>
#include <utility>

#include "nagd/random.hpp"

namespace nagd {

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim)
    : in_(in_dim), out_(out_dim), params_(out_dim * in_dim + out_dim) {}

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim, ParamVector params)
    : in_(in_dim), out_(out_dim) {
    set_params(std::move(params));
}

void DenseLayer::set_params(ParamVector params) {
    if (params.size() != param_count()) {
        throw ContractViolation("DenseLayer: expected " + std::to_string(param_count()) + " parameters, got " +
                                std::to_string(params.size()));
    }
    params_ = std::move(params);
}

ParamVector DenseLayer::forward(const ParamVector& x) const {
    if (x.size() != in_) {
        throw ContractViolation("DenseLayer::forward: expected input of length " + std::to_string(in_));
    }
    ParamVector out(out_);
    for (std::size_t r = 0; r < out_; ++r) {
        double acc = bias(r);
        for (std::size_t c = 0; c < in_; ++c) {
            acc += weight(r, c) * x[c];
        }
        out[r] = std::tanh(acc);
    }
    return out;
}

std::string_view to_string(LossKind kind) {
    return kind == LossKind::distance ? "distance" : "squared-distance";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "distance") {
        return LossKind::distance;
    }
    if (name == "squared-distance") {
        return LossKind::squared_distance;
    }
    throw ContractViolation("unknown loss '" + std::string(name) + "'");
}

Evaluation loss_and_grad(const DenseLayer& layer, std::span<const Sample> batch, LossKind kind) {
    if (batch.empty()) {
        throw ContractViolation("loss_and_grad: empty batch");
    }
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    Evaluation result{0.0, ParamVector(layer.param_count())};
    ParamVector delta(out);
    for (const Sample& s : batch) {
        if (s.y.size() != out) {
            throw ContractViolation("loss_and_grad: target length mismatch");
        }
        const ParamVector pred = layer.forward(s.x);
        double sq = 0.0;
        for (std::size_t r = 0; r < out; ++r) {
            const double e = pred[r] - s.y[r];
            sq += e * e;
        }
        double outer = 0.0; // d loss / d e_r = outer * e_r
        if (kind == LossKind::squared_distance) {
            result.value += sq;
            outer = 2.0;
        } else {
            const double dist = std::sqrt(sq);
            result.value += dist;
            outer = dist > 0.0 ? 1.0 / dist : 0.0;
        }
        for (std::size_t r = 0; r < out; ++r) {
            delta[r] = outer * (pred[r] - s.y[r]) * (1.0 - pred[r] * pred[r]);
            for (std::size_t c = 0; c < in; ++c) {
                result.gradient[r * in + c] += delta[r] * s.x[c];
            }
            result.gradient[out * in + r] += delta[r];
        }
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    result.value *= inv;
    for (double& g : result.gradient) {
        g *= inv;
    }
    return result;
}

double avg_distance(const DenseLayer& layer, std::span<const Sample> samples) {
    if (samples.empty()) {
        throw ContractViolation("avg_distance: empty sample set");
    }
    double total = 0.0;
    for (const Sample& s : samples) {
        const ParamVector pred = layer.forward(s.x);
        double sq = 0.0;
        for (std::size_t r = 0; r < pred.size(); ++r) {
            const double e = pred[r] - s.y[r];
            sq += e * e;
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(samples.size());
}

Objective batch_objective(const DenseLayer& shape, std::vector<Sample> batch, LossKind kind) {
    const std::size_t in = shape.in_dim();
    const std::size_t out = shape.out_dim();
    auto evaluator = [in, out, batch = std::move(batch), kind](const ParamVector& p) {
        return loss_and_grad(DenseLayer(in, out, p), batch, kind);
    };
    return Objective("dense-layer", shape.param_count(), std::move(evaluator));
}

ParamVector fan_in_uniform_init(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(in_dim));
    ParamVector p(out_dim * in_dim + out_dim);
    for (double& v : p) {
        v = rng.uniform(-limit, limit);
    }
    return p;
}

MatchingTask generate_task(std::uint64_t seed) {
    Rng rng(seed);
    MatchingTask task;
    task.data.seed = seed;
    task.data.teacher_params = fan_in_uniform_init(kMatchInputs, kMatchOutputs, rng);
    const DenseLayer teacher(kMatchInputs, kMatchOutputs, task.data.teacher_params);

    std::vector<Sample> points;
    points.reserve(kMatchPoints);
    for (std::size_t i = 0; i < kMatchPoints; ++i) {
        ParamVector x(kMatchInputs);
        for (double& v : x) {
            v = rng.uniform();
        }
        ParamVector y = teacher.forward(x);
        points.push_back({std::move(x), std::move(y)});
    }
    const auto half = static_cast<std::ptrdiff_t>(kMatchPoints / 2);
    task.data.train.assign(points.begin(), points.begin() + half);
    task.data.test.assign(points.begin() + half, points.end());
    task.student_init = fan_in_uniform_init(kMatchInputs, kMatchOutputs, rng);
    return task;
}

} // namespace nagd
