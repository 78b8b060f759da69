#pragma once

#include <vector>

#include "gqfpe/quadrature.hpp"
#include "gqfpe/special_functions.hpp"
#include "gqfpe/spectral_density.hpp"

namespace gqfpe {

enum class KernelMethod { ClosedForm, Quadrature };

// Prefactor of K_R^(2) in the closed form: Derived integrates the kernel definition
// (2 gamma_s G_2), Printed keeps gamma_s G_2.
enum class KR2Convention { Derived, Printed };

inline double kr2_prefactor(KR2Convention c) { return c == KR2Convention::Derived ? 2.0 : 1.0; }

enum class KernelKind { I, R };
enum class KernelId { KI0, KI1, KI2, KR0, KR1, KR2, KI1Tilde, KR1Tilde };

struct KernelOptions {
    KernelMethod method = KernelMethod::ClosedForm;
    KR2Convention convention = KR2Convention::Derived;
    quad::Tolerance tol{1e-19, 1e-12, 20000};
};

/// G0, G1, G2 and G1~ (selected by the matching F kind) at inverse temperature thermal.beta_s.
double G(FKind kind, const ThermalParams& thermal, double t_s);

/// t_s -> infinity limit of G.
double G_steady(FKind kind, double beta_s);

inline double G_n(int n, double beta_s, double t_s, ThermalParams thermal = {}) {
    thermal.beta_s = beta_s;
    return G(n == 0 ? FKind::F0 : n == 1 ? FKind::F1 : FKind::F2, thermal, t_s);
}
inline double G1_tilde(double beta_s, double t_s, ThermalParams thermal = {}) {
    thermal.beta_s = beta_s;
    return G(FKind::F1Tilde, thermal, t_s);
}

double eta_I_of_t(const SpectralDensityModel& model, double t_s,
                  KernelMethod method = KernelMethod::ClosedForm);

double eta_R_of_t(const SpectralDensityModel& model, const ThermalParams& thermal, double t_s,
                  KernelMethod method = KernelMethod::ClosedForm);

double kernel_K(KernelId id, double t_s, const SpectralDensityModel& model,
                const ThermalParams& thermal, const KernelOptions& options = {});

inline double kernel_K(KernelKind kind, int n, double t_s, const SpectralDensityModel& model,
                       const ThermalParams& thermal, const KernelOptions& options = {}) {
    static constexpr KernelId ids[2][3] = {{KernelId::KI0, KernelId::KI1, KernelId::KI2},
                                           {KernelId::KR0, KernelId::KR1, KernelId::KR2}};
    return kernel_K(ids[kind == KernelKind::R][n], t_s, model, thermal, options);
}

inline double kernel_K_tilde(KernelKind kind, double t_s, const SpectralDensityModel& model,
                             const ThermalParams& thermal, const KernelOptions& options = {}) {
    return kernel_K(kind == KernelKind::I ? KernelId::KI1Tilde : KernelId::KR1Tilde, t_s, model,
                    thermal, options);
}

struct KernelValues {
    double KI0 = 0, KI1 = 0, KI2 = 0;
    double KR0 = 0, KR1 = 0, KR2 = 0;
    double KI1_tilde = 0, KR1_tilde = 0;
};

KernelValues kernels_at(double t_s, const SpectralDensityModel& model, const ThermalParams& thermal,
                        const KernelOptions& options = {});

struct KernelTrack {
    std::vector<double> grid;
    std::vector<double> KI0, KI1, KI2, KR0, KR1, KR2, KI1_tilde, KR1_tilde;

    std::size_t size() const { return grid.size(); }
};

KernelTrack kernel_track(const std::vector<double>& grid, const SpectralDensityModel& model,
                         const ThermalParams& thermal, const KernelOptions& options = {});

/// Drive from the cross density for the constant imaginary-time path q_g = q0.
double drive_eta_c(double t_s, double q0, double cross_gamma_s);

}  // namespace gqfpe
