#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nagd {

/// Raised when a caller breaks an operation's precondition (length
/// mismatch, out-of-domain hyperparameter, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Flat dense vector of 64-bit parameters. The length is fixed at
/// construction; binary operations require equal lengths.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
    ParamVector(std::initializer_list<double> init) : values_(init) {}
    explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] std::span<const double> view() const noexcept { return values_; }
    [[nodiscard]] std::span<double> view() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    std::vector<double> values_;
};

/// Sum of a[i]*b[i], accumulated left to right.
double dot(const ParamVector& a, const ParamVector& b);

/// y + alpha*x, elementwise. Inputs are not modified.
ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y);

double norm_sq(const ParamVector& a);
double norm(const ParamVector& a);

/// k*a elementwise.
ParamVector scale(double k, const ParamVector& a);

/// True when every entry is finite and no magnitude exceeds `bound`.
bool all_finite_within(const ParamVector& a, double bound);

void require_same_length(const ParamVector& a, const ParamVector& b, const char* op);

} // namespace nagd
