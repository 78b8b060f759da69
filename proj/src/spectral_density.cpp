#include "gqfpe/spectral_density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gqfpe/errors.hpp"
#include "gqfpe/special_functions.hpp"

namespace gqfpe {

SpectralDensityModel SpectralDensityModel::ohmic_drude(double gamma_s) {
    SpectralDensityModel m;
    m.gamma_s = gamma_s;
    m.validate();
    return m;
}

SpectralDensityModel SpectralDensityModel::tabulated(std::vector<std::pair<double, double>> table) {
    SpectralDensityModel m;
    m.kind = DensityKind::Tabulated;
    m.gamma_s = 0.0;
    m.table = std::move(table);
    m.validate();
    return m;
}

void SpectralDensityModel::validate() const {
    if (!(omega_c > 0.0)) throw DomainError("omega_c must be positive");
    if (kind == DensityKind::OhmicDrude) {
        if (!(gamma_s >= 0.0) || !std::isfinite(gamma_s)) throw DomainError("gamma_s must be >= 0");
        return;
    }
    if (table.size() < 2) throw DomainError("tabulated density needs at least two points");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto [w, eta] = table[i];
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("tabulated omega must be >= 0");
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("tabulated eta must be >= 0");
        if (i == 0) continue;
        const double prev = table[i - 1].first;
        if (!(w > prev)) throw DomainError("tabulated omega must be strictly increasing");
        if (prev < 2.0 && w - prev > 0.1) {
            throw DomainError("tabulated grid does not resolve omega_c: spacing " +
                              std::to_string(w - prev) + " at omega " + std::to_string(prev));
        }
    }
}

void BathPair::validate() const {
    excited.validate();
    if (!(ground_gamma_s >= 0.0)) throw DomainError("ground_gamma_s must be >= 0");
    const double bound = excited.gamma_s * ground_gamma_s;
    if (cross_gamma_s * cross_gamma_s > bound * (1.0 + 1e-12)) {
        throw DomainError("cross_gamma_s^2 exceeds gamma_s * ground_gamma_s");
    }
}

void ThermalParams::validate() const {
    if (!(beta_s > 0.0) || !std::isfinite(beta_s)) throw DomainError("beta_s must be positive");
    if (!(matsubara_tol > 0.0)) throw DomainError("matsubara_tol must be positive");
    if (matsubara_max_terms < 1) throw DomainError("matsubara_max_terms must be >= 1");
}

double eta_e_of_omega(const SpectralDensityModel& model, double omega) {
    if (omega < 0.0) throw DomainError("eta_e_of_omega: negative frequency");
    if (model.is_ohmic()) return 2.0 * model.gamma_s * omega / (omega * omega + 1.0);
    const auto& t = model.table;
    if (omega < t.front().first || omega > t.back().first) return 0.0;
    auto hi = std::upper_bound(t.begin(), t.end(), omega,
                               [](double w, const auto& p) { return w < p.first; });
    if (hi == t.end()) return t.back().second;
    auto lo = hi - 1;
    const double u = (omega - lo->first) / (hi->first - lo->first);
    return lo->second + u * (hi->second - lo->second);
}

double kappa_e(const SpectralDensityModel& model) {
    if (model.is_ohmic()) return 2.0 * model.gamma_s;
    double integral = 0.0;
    const auto& t = model.table;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const auto [w1, e1] = t[i];
        const auto [w2, e2] = t[i + 1];
        const double slope = (e2 - e1) / (w2 - w1);
        const double intercept = e1 - slope * w1;
        if (w1 == 0.0) {
            if (intercept > 0.0) throw NumericalError("kappa_e: eta(w)/w is not integrable at w = 0");
            integral += slope * (w2 - w1);
            continue;
        }
        integral += intercept * std::log(w2 / w1) + slope * (w2 - w1);
    }
    return 2.0 / kPi * integral;
}

}  // namespace gqfpe
