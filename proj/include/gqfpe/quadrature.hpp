#pragma once

#include <functional>
#include <span>

namespace gqfpe::quad {

using Integrand = std::function<double(double)>;

struct Result {
    double value = 0.0;
    double error = 0.0;
    double magnitude = 0.0;  // estimate of the integral of |f|
    int evaluations = 0;
    bool converged = true;
};

struct Tolerance {
    double abs = 1e-15;
    double rel = 1e-12;
    int max_intervals = 4000;
};

/// One 21-point Kronrod panel with the embedded 10-point Gauss error estimate.
Result gauss_kronrod21(const Integrand& f, double a, double b);

/// Globally adaptive bisection on [a, b].
Result integrate(const Integrand& f, double a, double b, const Tolerance& tol = {});

/// Same, starting from the panels delimited by consecutive breakpoints.
Result integrate(const Integrand& f, std::span<const double> breakpoints, const Tolerance& tol = {});

/// Integral over [a, inf) of a non-oscillatory integrand decaying at least like x^-2.
Result integrate_to_infinity(const Integrand& f, double a, const Tolerance& tol = {});

struct Extrapolation {
    double value = 0.0;
    double error = 0.0;
};

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
Extrapolation wynn_epsilon(std::span<const double> partial_sums);

/// Integral over [a, inf) of an oscillatory integrand whose sign alternates on
/// panels of length half_period; panels are summed and the partial sums extrapolated.
Result integrate_oscillatory_tail(const Integrand& f, double a, double half_period,
                                  const Tolerance& tol = {}, int max_cycles = 600);

}  // namespace gqfpe::quad
