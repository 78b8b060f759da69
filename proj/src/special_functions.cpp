#include "gqfpe/special_functions.hpp"

#include <cmath>

#include "gqfpe/errors.hpp"

namespace gqfpe {

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    const double series =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
    return acc + std::log(x) - 0.5 / x - series;
}

namespace {

int order(FKind kind) {
    switch (kind) {
        case FKind::F0: return 0;
        case FKind::F1: case FKind::F1Tilde: return 1;
        default: return 2;
    }
}

// e^-x sum_{k>n} x^k/k!, accurate where 1 - E_n(x) cancels
double tail_series(int n, double x) {
    double term = 1.0;
    for (int k = 1; k <= n + 1; ++k) term *= x / k;
    double sum = 0.0;
    for (int k = n + 2; k < 60; ++k) {
        sum += term;
        term *= x / k;
        if (term < 1e-18 * sum) break;
    }
    return std::exp(-x) * (sum + term);
}

}  // namespace

double F(FKind kind, double x) {
    if (x < 0.0) throw DomainError("F: negative argument");
    if (kind == FKind::F0) return -std::expm1(-x);
    if (x > 1.0) return 1.0 - E(kind, x);
    const double base = tail_series(order(kind), x);
    if (kind == FKind::F1Tilde) return base + 0.5 * x * x * std::exp(-x);
    return base;
}

double E(FKind kind, double x) {
    const double ex = std::exp(-x);
    switch (kind) {
        case FKind::F0: return ex;
        case FKind::F1: return (1.0 + x) * ex;
        case FKind::F2: return (1.0 + x + 0.5 * x * x) * ex;
        case FKind::F1Tilde: return (1.0 + x - 0.5 * x * x) * ex;
    }
    return 0.0;
}

double E_derivative(FKind kind, double x) {
    const double ex = std::exp(-x);
    switch (kind) {
        case FKind::F0: return -ex;
        case FKind::F1: return -x * ex;
        case FKind::F2: return -0.5 * x * x * ex;
        case FKind::F1Tilde: return (-2.0 * x + 0.5 * x * x) * ex;
    }
    return 0.0;
}

}  // namespace gqfpe
