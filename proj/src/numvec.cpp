#include "nagd/numvec.hpp"

#include <cmath>

namespace nagd {

void require_same_length(const ParamVector& a, const ParamVector& b, const char* op) {
    if (a.size() != b.size()) {
        throw ContractViolation(std::string(op) + ": length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
    }
}

double dot(const ParamVector& a, const ParamVector& b) {
    require_same_length(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y) {
    require_same_length(x, y, "axpy");
    ParamVector out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = y[i] + alpha * x[i];
    }
    return out;
}

double norm_sq(const ParamVector& a) { return dot(a, a); }

double norm(const ParamVector& a) { return std::sqrt(norm_sq(a)); }

ParamVector scale(double k, const ParamVector& a) {
    ParamVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = k * a[i];
    }
    return out;
}

bool all_finite_within(const ParamVector& a, double bound) {
    for (double v : a) {
        if (!std::isfinite(v) || std::fabs(v) > bound) {
            return false;
        }
    }
    return true;
}

} // namespace nagd
