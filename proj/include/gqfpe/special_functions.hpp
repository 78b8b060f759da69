#pragma once

namespace gqfpe {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Digamma function for x > 0.
double digamma(double x);

/// The four memory functions of the Ohmic-Drude kernels.
enum class FKind { F0, F1, F2, F1Tilde };

/// F(x) = 1 - E(x) with E0 = e^-x, E1 = (1+x)e^-x, E2 = (1+x+x^2/2)e^-x, E1~ = (1+x-x^2/2)e^-x.
double F(FKind kind, double x);
double E(FKind kind, double x);
double E_derivative(FKind kind, double x);

inline double F_n(int n, double x) {
    return F(n == 0 ? FKind::F0 : n == 1 ? FKind::F1 : FKind::F2, x);
}
inline double F1_tilde(double x) { return F(FKind::F1Tilde, x); }

}  // namespace gqfpe
