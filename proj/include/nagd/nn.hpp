#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nagd/numvec.hpp"
#include "nagd/objective.hpp"
#include "nagd/random.hpp"

namespace nagd {

/// y = tanh(W x + b). Parameters are flattened as [W row-major, then b] so
/// optimizers can work on a single ParamVector.
class DenseLayer {
public:
    DenseLayer(std::size_t in_dim, std::size_t out_dim);
    DenseLayer(std::size_t in_dim, std::size_t out_dim, ParamVector params);

    [[nodiscard]] std::size_t in_dim() const noexcept { return in_; }
    [[nodiscard]] std::size_t out_dim() const noexcept { return out_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return out_ * in_ + out_; }

    [[nodiscard]] const ParamVector& params() const noexcept { return params_; }
    void set_params(ParamVector params);

    double weight(std::size_t row, std::size_t col) const { return params_[row * in_ + col]; }
    double bias(std::size_t row) const { return params_[out_ * in_ + row]; }

    [[nodiscard]] ParamVector forward(const ParamVector& x) const;

private:
    std::size_t in_;
    std::size_t out_;
    ParamVector params_;
};

struct Sample {
    ParamVector x;
    ParamVector y;
};

enum class LossKind {
    distance,         // |forward(x) - y|, averaged over the batch
    squared_distance, // |forward(x) - y|^2, averaged over the batch
};

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

/// Batch loss and its analytic gradient with respect to layer.params().
/// The distance loss has no gradient where a prediction is exact; such
/// samples contribute zero.
Evaluation loss_and_grad(const DenseLayer& layer, std::span<const Sample> batch, LossKind kind);

/// Mean Euclidean distance between predictions and targets.
double avg_distance(const DenseLayer& layer, std::span<const Sample> samples);

/// Wraps a fixed batch as an Objective over the layer parameters.
Objective batch_objective(const DenseLayer& shape, std::vector<Sample> batch, LossKind kind);

inline constexpr std::size_t kMatchInputs = 10;
inline constexpr std::size_t kMatchOutputs = 4;
inline constexpr std::size_t kMatchPoints = 200;

struct MatchingDataset {
    std::vector<Sample> train;
    std::vector<Sample> test;
    ParamVector teacher_params;
    std::uint64_t seed = 0;
};

struct MatchingTask {
    MatchingDataset data;
    ParamVector student_init;
};

/// Fan-in uniform initialisation on [-1/sqrt(in), 1/sqrt(in)] for every
/// weight and bias.
ParamVector fan_in_uniform_init(std::size_t in_dim, std::size_t out_dim, Rng& rng);

/// Teacher layer 10 -> 4, 200 inputs uniform on [0,1]^10 labelled by the
/// teacher, split 100/100 into train/test, plus a student initialisation.
/// Fully determined by `seed`.
MatchingTask generate_task(std::uint64_t seed);

} // namespace nagd
