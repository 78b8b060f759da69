#include "gqfpe/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gqfpe/errors.hpp"

namespace gqfpe {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Assemble from the memory functions; k2 = K_R^(2).
CoefficientSample assemble(double t, double gamma, double f2, double f1t, double g0, double g1t,
                           double k2) {
    CoefficientSample s;
    s.t_s = t;
    s.r_m = 1.0 - 2.0 * gamma * f2;
    if (!(s.r_m > 0.0)) {
        const double critical = f2 > 0.0 ? 0.5 / f2 : INFINITY;
        std::ostringstream msg;
        msg << "effective mass vanished at t_s = " << t << ": gamma_s must stay below " << critical;
        throw EffectiveMassError(msg.str(), t, critical);
    }
    const double rm = s.r_m;
    s.Gamma = f1t / rm;
    s.R_pq = g1t / rm - 2.0 * k2 * f1t / (rm * rm);
    s.R_qq = k2 / (2.0 * rm * rm);
    s.R_pp = g0 / gamma - 2.0 * s.Gamma * g1t + 2.0 * s.Gamma * s.Gamma * k2;
    // generic expression, kept separate from R_pp
    const double kr0 = gamma * g0, ki1t = gamma * f1t, kr1t = gamma * g1t, kr2 = k2;
    s.alpha = kr0 - 2.0 / rm * ki1t * (kr1t - kr2 * ki1t / rm);
    s.D = 4.0 * s.R_pp * s.R_qq - s.R_pq * s.R_pq - s.Gamma * s.Gamma;
    s.branch = kr2 / rm;
    s.weak_damping_ok = s.branch < 1.0;
    return s;
}

double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace

CoefficientSample coefficient_at(double t, double gamma, const ThermalParams& th,
                                 KR2Convention convention) {
    if (!(t >= 0.0)) throw DomainError("t_s must be >= 0");
    if (!(gamma >= 0.0)) throw DomainError("gamma_s must be >= 0");
    th.validate();
    if (gamma == 0.0) {
        CoefficientSample s;
        s.t_s = t;
        return s;
    }
    if (t == 0.0) {
        CoefficientSample s;
        return s;
    }
    const double k = kr2_prefactor(convention);
    return assemble(t, gamma, F(FKind::F2, t), F(FKind::F1Tilde, t), G(FKind::F0, th, t),
                    G(FKind::F1Tilde, th, t), k * gamma * G(FKind::F2, th, t));
}

CoefficientSample coefficient_steady(double gamma, const ThermalParams& th, KR2Convention convention) {
    if (!(gamma >= 0.0)) throw DomainError("gamma_s must be >= 0");
    th.validate();
    CoefficientSample s;
    s.t_s = INFINITY;
    if (gamma == 0.0) return s;
    const double b = th.beta_s;
    s = assemble(INFINITY, gamma, 1.0, 1.0, G_steady(FKind::F0, b), G_steady(FKind::F1Tilde, b),
                 kr2_prefactor(convention) * gamma * G_steady(FKind::F2, b));
    return s;
}

CoefficientSample coefficients_from_kernels(double t, double gamma, const KernelValues& k) {
    CoefficientSample s;
    s.t_s = t;
    if (gamma == 0.0) return s;
    const double me = 1.0 - k.KI2;
    if (!(me > 0.0)) throw EffectiveMassError("effective mass vanished", t, NAN);
    s.r_m = me;
    s.Gamma = k.KI1_tilde / me / gamma;
    s.R_pq = (k.KR1_tilde / me - 2.0 * k.KR2 / (me * me) * k.KI1_tilde) / gamma;
    s.R_qq = k.KR2 / (2.0 * me * me);
    s.alpha = k.KR0 - 2.0 / me * k.KI1_tilde * (k.KR1_tilde - k.KR2 * k.KI1_tilde / me);
    s.R_pp = s.alpha / (gamma * gamma);
    s.D = 4.0 * s.R_pp * s.R_qq - s.R_pq * s.R_pq - s.Gamma * s.Gamma;
    s.branch = k.KR2 / me;
    s.weak_damping_ok = s.branch < 1.0;
    return s;
}

CoefficientTrack coefficient_track(const std::vector<double>& grid, double gamma,
                                   const ThermalParams& th, KR2Convention convention) {
    if (grid.empty() || grid.front() != 0.0) throw DomainError("coefficient grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError("coefficient grid must be strictly increasing");
    }
    CoefficientTrack track;
    track.gamma_s = gamma;
    track.beta_s = th.beta_s;
    track.samples.reserve(grid.size());
    for (double t : grid) track.samples.push_back(coefficient_at(t, gamma, th, convention));
    track.steady = coefficient_steady(gamma, th, convention);
    return track;
}

double generic_vs_ohmic_check(double t, double gamma, double beta, KernelMethod source,
                              KR2Convention convention) {
    if (t == 0.0 || gamma == 0.0) return 0.0;
    ThermalParams th;
    th.beta_s = beta;
    const CoefficientSample closed = coefficient_at(t, gamma, th, convention);
    KernelOptions opt;
    opt.method = source;
    opt.convention = convention;
    const KernelValues k = kernels_at(t, SpectralDensityModel::ohmic_drude(gamma), th, opt);
    const CoefficientSample generic = coefficients_from_kernels(t, gamma, k);
    return std::max({rel_dev(closed.Gamma, generic.Gamma), rel_dev(closed.R_pq, generic.R_pq),
                     rel_dev(closed.R_qq, generic.R_qq), rel_dev(closed.R_pp, generic.R_pp)});
}

PositivityReport positivity_report(const CoefficientTrack& track) {
    if (track.samples.empty()) throw DomainError("positivity_report: empty track");
    PositivityReport rep;
    rep.steady_sign = sign_of(track.steady.D);
    rep.min_D = rep.max_D = track.samples.front().D;
    bool any_positive_time = false;
    rep.negative_throughout = true;
    const CoefficientSample* last = nullptr;  // last sample with D != 0
    for (const auto& s : track.samples) {
        rep.min_D = std::min(rep.min_D, s.D);
        rep.max_D = std::max(rep.max_D, s.D);
        rep.max_branch = std::max(rep.max_branch, s.branch);
        rep.weak_damping_ok = rep.weak_damping_ok && s.weak_damping_ok;
        if (s.t_s > 0.0) {
            any_positive_time = true;
            if (!(s.D < 0.0)) rep.negative_throughout = false;
        }
        if (s.D == 0.0) continue;
        if (last && sign_of(last->D) != sign_of(s.D)) {
            const double u = last->D / (last->D - s.D);
            rep.sign_changes.push_back(last->t_s + u * (s.t_s - last->t_s));
        }
        last = &s;
    }
    rep.negative_throughout = rep.negative_throughout && any_positive_time;
    rep.final_sign = sign_of(track.samples.back().D);
    return rep;
}

std::vector<double> uniform_grid(double t_max, int steps) {
    if (!(t_max > 0.0) || steps < 1) throw DomainError("grid needs t_max > 0 and steps >= 1");
    std::vector<double> g(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) g[i] = t_max * i / steps;
    return g;
}

}  // namespace gqfpe
