#pragma once

#include <vector>

#include "gqfpe/kernels.hpp"

namespace gqfpe {

struct CoefficientSample {
    double t_s = 0.0;
    double r_m = 1.0;
    double Gamma = 0.0;
    double R_pq = 0.0;
    double R_qq = 0.0;
    double R_pp = 0.0;
    double alpha = 0.0;
    double D = 0.0;
    double branch = 0.0;  // K_R^(2) / m_e
    bool weak_damping_ok = true;
};

/// Ohmic-Drude closed-form coefficients at one time.
CoefficientSample coefficient_at(double t_s, double gamma_s, const ThermalParams& thermal,
                                 KR2Convention convention = KR2Convention::Derived);

/// t_s -> infinity limit (F = 1, G at its steady value).
CoefficientSample coefficient_steady(double gamma_s, const ThermalParams& thermal,
                                     KR2Convention convention = KR2Convention::Derived);

/// Coefficients from raw kernel values through the generic kernel expressions.
CoefficientSample coefficients_from_kernels(double t_s, double gamma_s, const KernelValues& k);

struct CoefficientTrack {
    double gamma_s = 0.0;
    double beta_s = 0.0;
    std::vector<CoefficientSample> samples;
    CoefficientSample steady;
};

CoefficientTrack coefficient_track(const std::vector<double>& grid, double gamma_s,
                                   const ThermalParams& thermal,
                                   KR2Convention convention = KR2Convention::Derived);

/// Largest relative deviation of Gamma, R_pq, R_qq, R_pp between the generic kernel
/// form and the closed form.
double generic_vs_ohmic_check(double t_s, double gamma_s, double beta_s,
                              KernelMethod kernel_source = KernelMethod::ClosedForm,
                              KR2Convention convention = KR2Convention::Derived);

struct PositivityReport {
    std::vector<double> sign_changes;  // times where D changes sign
    int steady_sign = 0;
    int final_sign = 0;  // sign of D at the last sample
    bool negative_throughout = false;  // D < 0 at every sample with t_s > 0
    bool weak_damping_ok = true;
    double max_branch = 0.0;
    double min_D = 0.0;
    double max_D = 0.0;
};

PositivityReport positivity_report(const CoefficientTrack& track);

/// Uniform grid 0, t_max/steps, ..., t_max.
std::vector<double> uniform_grid(double t_max, int steps);

}  // namespace gqfpe
