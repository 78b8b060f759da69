#pragma once

#include <functional>
#include <vector>

#include "gqfpe/coefficients.hpp"
#include "gqfpe/operators.hpp"

namespace gqfpe {

struct PropagationConfig {
    double t_end = 20.0;
    double dt = 1e-3;
    double gamma_s = 0.1;
    double beta_s = 1.0;
    double q0 = 0.0;
    double cross_gamma_s = 0.0;
    KR2Convention convention = KR2Convention::Derived;
    double matsubara_tol = 1e-10;
    int record_every = 100;       // steps between observable records
    bool track_min_eig = true;
    bool track_energy = true;
    bool symmetrize = false;      // rho <- (rho + rho^dagger)/2 after each step
    double trace_abort = 1e-6;

    void validate() const;
    int steps() const;
};

struct Observables {
    double t_s = 0.0;
    double trace = 0.0;
    double q_mean = 0.0;
    double p_mean = 0.0;
    double q2 = 0.0;      // <q^2>
    double p2 = 0.0;      // <p^2>
    double qp_sym = 0.0;  // <{q,p}>/2
    double purity = 0.0;
    double min_eig = NAN;
    double energy = NAN;
    double hermiticity = 0.0;

    double q_var() const { return q2 - q_mean * q_mean; }
    double p_var() const { return p2 - p_mean * p_mean; }
    double qp_cov() const { return qp_sym - q_mean * p_mean; }
};

Observables observables(const MatrixXc& rho, const Operators& ops, const BandedOperator* H = nullptr,
                        bool with_min_eig = true);

struct Trajectory {
    std::vector<Observables> records;
    MatrixXc final_rho;
    double max_trace_drift = 0.0;
    double max_hermiticity = 0.0;
    double min_eigenvalue = NAN;  // over the recorded samples
    int steps = 0;
};

using StepObserver = std::function<void(double t_s, const MatrixXc& rho)>;

Trajectory propagate(const MatrixXc& rho0, const BasisSpec& basis, const PropagationConfig& config,
                     const PotentialModel& potential, const StepObserver& observer = {});

}  // namespace gqfpe
