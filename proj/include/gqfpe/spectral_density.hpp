#pragma once

#include <utility>
#include <vector>

namespace gqfpe {

enum class DensityKind { OhmicDrude, Tabulated };

// Scaled units throughout: hbar = m = omega_c = 1.
struct SpectralDensityModel {
    DensityKind kind = DensityKind::OhmicDrude;
    double gamma_s = 0.1;
    double omega_c = 1.0;
    std::vector<std::pair<double, double>> table;  // (omega, eta) for Tabulated

    static SpectralDensityModel ohmic_drude(double gamma_s);
    static SpectralDensityModel tabulated(std::vector<std::pair<double, double>> table);

    void validate() const;
    bool is_ohmic() const { return kind == DensityKind::OhmicDrude; }
};

struct BathPair {
    SpectralDensityModel excited;
    double cross_gamma_s = 0.0;
    double ground_gamma_s = 0.0;

    void validate() const;
    // opposite-sign couplings are admissible but unusual
    bool negative_cross() const { return cross_gamma_s < 0.0; }
};

struct ThermalParams {
    double beta_s = 1.0;
    double matsubara_tol = 1e-10;
    long matsubara_max_terms = 1000000;

    void validate() const;
};

double eta_e_of_omega(const SpectralDensityModel& model, double omega);

/// Counterterm spring constant (2/pi) int eta(w)/w dw.
double kappa_e(const SpectralDensityModel& model);

}  // namespace gqfpe
