#pragma once

#include <vector>

#include "gqfpe/spectral_density.hpp"
#include "gqfpe/types.hpp"

namespace gqfpe {

struct DiscretizedBath {
    Eigen::VectorXd omega;  // mode frequencies
    Eigen::VectorXd c_e;    // excited-state couplings
    Eigen::VectorXd c_g;    // ground-state couplings

    int n_modes() const { return static_cast<int>(omega.size()); }
    /// sum c_e^2 / omega^2
    double kappa() const;
};

/// Equal slices of int_0^omega_max eta(w)/w dw, one mode at the weight midpoint of each.
DiscretizedBath discretize_bath(const SpectralDensityModel& model, int n_modes, double omega_max,
                                double ground_gamma_s = 0.0);

struct GaussianState {
    Eigen::VectorXd mean;  // positions then momenta
    Eigen::MatrixXd cov;   // symmetrised covariance

    int modes() const { return static_cast<int>(mean.size() / 2); }
};

/// Potential-energy Hessian and minimum of a harmonic system mode coupled bilinearly to the bath
/// in completed-square form.
struct QuadraticHamiltonian {
    Eigen::MatrixXd hessian;
    Eigen::VectorXd minimum;
};

QuadraticHamiltonian system_bath_hamiltonian(double omega_sys, double shift, const Eigen::VectorXd& omega,
                                             const Eigen::VectorXd& c);

GaussianState thermal_state(const QuadraticHamiltonian& h, double beta_s);

/// Exact flow of H = p^2/2 + (x - x0)^T K (x - x0)/2.
class SymplecticFlow {
public:
    explicit SymplecticFlow(const QuadraticHamiltonian& h);

    Eigen::MatrixXd matrix(double t_s) const;
    GaussianState evolve(const GaussianState& state, double t_s) const;

    /// Moments of the mode at `index` only, without forming the full flow.
    struct ModeMoments {
        double q_mean, p_mean, q_var, p_var, qp_cov;
    };
    ModeMoments mode_moments(const GaussianState& initial, double t_s, int index = 0) const;

private:
    Eigen::MatrixXd modes_;      // orthonormal eigenvectors of K
    Eigen::VectorXd frequency_;  // sqrt of eigenvalues
    Eigen::VectorXd minimum_;
};

GaussianState evolve_gaussian(const GaussianState& state, const QuadraticHamiltonian& h, double t_s);

struct ReducedMoments {
    double q_mean = 0.0, p_mean = 0.0, q2 = 0.0, p2 = 0.0, qp_sym = 0.0;
};

ReducedMoments reduced_moments(const GaussianState& state, int index = 0);

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov);

struct OracleConfig {
    double gamma_s = 0.05;
    double beta_s = 0.5;
    double omega_e = 1.0;
    double omega_g = 1.0;
    double shift = 1.0;
    double ground_gamma_s = 0.0;
    int n_modes = 512;
    double omega_max = 30.0;

    void validate() const;
};

struct OracleRecord {
    double t_s = 0.0;
    ReducedMoments moments;
    double purity = 0.0;  // of the reduced Gaussian state
};

std::vector<OracleRecord> oracle_trajectory(const OracleConfig& config, const std::vector<double>& times);

}  // namespace gqfpe
