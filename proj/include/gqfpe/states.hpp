#pragma once

#include "gqfpe/operators.hpp"

namespace gqfpe {

/// First and second moments of a one-mode Gaussian state.
struct GaussianMoments {
    double q_mean = 0.0;
    double p_mean = 0.0;
    double q_var = 0.5;
    double p_var = 0.5;
    double qp_cov = 0.0;  // <{q,p}>/2 - <q><p>
};

struct ProjectedState {
    MatrixXc rho;
    double leakage = 0.0;  // population lost to truncation before renormalisation
};

/// Oscillator eigenfunctions psi_0..psi_{n-1} at frequency omega, evaluated at x.
RealMatrix<double> oscillator_wavefunctions(int n, double omega, const RealVector<double>& x);

/// Density matrix of a Gaussian state in the truncated basis, renormalised to unit trace.
ProjectedState gaussian_state(const BasisSpec& basis, const GaussianMoments& m, double max_leakage = 1e-6);

ProjectedState initial_state_thermal(double beta_s, double omega_g, const BasisSpec& basis,
                                     double max_leakage = 1e-6);

ProjectedState coherent_state(const BasisSpec& basis, double q_mean, double p_mean = 0.0,
                              double max_leakage = 1e-6);

}  // namespace gqfpe
