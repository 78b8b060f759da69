#include "gqfpe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gqfpe/errors.hpp"

namespace gqfpe {

namespace {

constexpr double kPoleWindow = 1e-4;
constexpr double kPoleStep = 1e-2;

int power_of(FKind kind) {
    switch (kind) {
        case FKind::F0: return 0;
        case FKind::F2: return 2;
        default: return 1;
    }
}

// offset + sign * S with S = cot(beta/2) f(1) + (4/beta) sum_n f(nu_n)/(nu_n^2 - 1),
// nu_n = 2 pi n / beta. f must decay exponentially once nu t is large; the series is
// truncated relative to the returned value, not to S.
template <class Fn, class DFn>
double matsubara_sum(const Fn& f, const DFn& df, const ThermalParams& th, double t,
                     double offset = 0.0, double sign = 1.0) {
    const double beta = th.beta_s;
    const long k = std::lround(beta / (2.0 * kPi));
    const bool near_pole = k >= 1 && std::abs(beta - 2.0 * kPi * k) < kPoleWindow;

    auto pair_at = [&](double b) {
        const double nu = 2.0 * kPi * k / b;
        return f(1.0) / std::tan(0.5 * b) + 4.0 / b * f(nu) / ((nu - 1.0) * (nu + 1.0));
    };

    double head;
    if (near_pole) {
        const double limit = (df(1.0) - 0.5 * f(1.0)) / (kPi * k);
        const double pole = 2.0 * kPi * k;
        const double lo = pair_at(pole - kPoleStep);
        const double hi = pair_at(pole + kPoleStep);
        const double x = beta - pole;
        head = limit + (hi - lo) / (2.0 * kPoleStep) * x +
               (hi + lo - 2.0 * limit) / (2.0 * kPoleStep * kPoleStep) * x * x;
    } else {
        const double c = std::tan(0.5 * beta);
        if (std::abs(c) < 1e-300) throw SingularityError("beta_s sits on a pole of cot(beta_s/2)");
        head = f(1.0) / c;
    }

    const double nu1 = 2.0 * kPi / beta;
    double acc = 0.0, prev = 0.0;
    for (long n = 1; n <= th.matsubara_max_terms; ++n) {
        if (near_pole && n == k) continue;
        const double nu = nu1 * n;
        const double term = 4.0 / beta * f(nu) / ((nu - 1.0) * (nu + 1.0));
        acc += term;
        if (nu * t >= 5.0) {
            const double r = prev != 0.0 ? term / prev : 0.0;
            const double tail = r > 0.0 && r < 1.0 ? term * r / (1.0 - r) : 0.0;
            const double value = offset + sign * (head + acc + tail);
            if (std::abs(term) <= th.matsubara_tol * std::abs(value)) return value;
        }
        prev = term;
    }
    throw TruncationError("Matsubara series did not reach tolerance within " +
                              std::to_string(th.matsubara_max_terms) + " terms",
                          std::abs(prev));
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t_s must be finite and >= 0");
}

// omega coth(omega beta / 2) without the 0 * inf at omega = 0
double omega_coth(double w, double beta) {
    const double y = 0.5 * w * beta;
    if (y < 1e-8) return 2.0 / beta;
    return 2.0 / beta * (y / std::tanh(y));
}

// Inner time integrals of the kernel definitions at frequency w:
// I_n = int_0^t cos(w s) s^n ds, J_n = int_0^t sin(w s) s^n ds (plus tilde corrections).
double inner(KernelId id, double w, double t) {
    const double x = w * t;
    const double half_t2 = 0.5 * t * t;
    const bool cosine = id == KernelId::KR0 || id == KernelId::KR1 || id == KernelId::KR2 ||
                        id == KernelId::KR1Tilde;
    int n = 0;
    switch (id) {
        case KernelId::KI1: case KernelId::KR1: case KernelId::KI1Tilde: case KernelId::KR1Tilde:
            n = 1; break;
        case KernelId::KI2: case KernelId::KR2: n = 2; break;
        default: break;
    }
    double value;
    if (x < 2.0) {
        const double x2 = x * x;
        double sum = 0.0;
        double term = cosine ? 1.0 : x;  // x^{2k}/(2k)! or x^{2k+1}/(2k+1)!
        for (int k = 0; k < 40; ++k) {
            const int j = cosine ? 2 * k : 2 * k + 1;
            const double add = term / (j + n + 1) * (k % 2 ? -1.0 : 1.0);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
            term *= x2 / ((j + 1.0) * (j + 2.0));
        }
        value = sum * std::pow(t, n + 1);
    } else {
        const double s = std::sin(x), c = std::cos(x);
        const double w2 = w * w;
        if (cosine) {
            value = n == 0 ? s / w
                  : n == 1 ? (c + x * s - 1.0) / w2
                           : (x * x * s + 2.0 * x * c - 2.0 * s) / (w2 * w);
        } else {
            value = n == 0 ? (1.0 - c) / w
                  : n == 1 ? (s - x * c) / w2
                           : (2.0 * x * s - (x * x - 2.0) * c - 2.0) / (w2 * w);
        }
    }
    if (id == KernelId::KR1Tilde) value += half_t2 * std::cos(x);
    if (id == KernelId::KI1Tilde) value += half_t2 * std::sin(x);
    return value;
}

// Part of inner() that does not oscillate at large w.
double inner_smooth(KernelId id, double w) {
    switch (id) {
        case KernelId::KR1: case KernelId::KR1Tilde: return -1.0 / (w * w);
        case KernelId::KI0: return 1.0 / w;
        case KernelId::KI2: return -2.0 / (w * w * w);
        default: return 0.0;
    }
}

bool is_real_part(KernelId id) {
    return id == KernelId::KR0 || id == KernelId::KR1 || id == KernelId::KR2 ||
           id == KernelId::KR1Tilde;
}

void check_result(const quad::Result& r, const char* what) {
    if (!r.converged && r.error > 1e-8 * std::max(std::abs(r.value), 1e-12)) {
        throw NumericalError(std::string(what) + ": quadrature did not converge", r.error);
    }
}

// (1/pi) int_0^inf weight(w) g(w) dw for the Ohmic-Drude density, where g is bounded,
// g = smooth + oscillatory with angular period 2 pi / t at large w.
template <class Weight, class Inner, class Smooth>
double ohmic_integral(const Weight& weight, const Inner& g, const Smooth& smooth, double t,
                      double omega0, const quad::Tolerance& tol, const char* what) {
    // quarter periods: whole half-period panels leave ~1e-16 absolute bias on cancelling sums
    const double h = 0.25 * std::min(kPi / t, 2.0);
    std::vector<double> pts;
    for (double w = 0.0; w < omega0; w += h) pts.push_back(w);
    pts.push_back(omega0);
    if (pts.size() >= 2 && pts[pts.size() - 1] - pts[pts.size() - 2] < 1e-9) pts.erase(pts.end() - 2);

    auto full = [&](double w) { return weight(w) * g(w); };
    const quad::Result head = quad::integrate(full, pts, tol);
    check_result(head, what);

    // the tails only need to be accurate relative to the whole integral
    quad::Tolerance tail_tol = tol;
    tail_tol.abs = std::max(tol.abs, 0.1 * tol.rel * std::abs(head.value));
    auto smooth_part = [&](double w) { return weight(w) * smooth(w); };
    auto osc_part = [&](double w) { return weight(w) * (g(w) - smooth(w)); };
    const quad::Result tail_smooth = quad::integrate_to_infinity(smooth_part, omega0, tail_tol);
    check_result(tail_smooth, what);
    const quad::Result tail_osc = quad::integrate_oscillatory_tail(osc_part, omega0, kPi / t, tail_tol);
    check_result(tail_osc, what);
    return (head.value + tail_smooth.value + tail_osc.value) / kPi;
}

template <class Weight, class Inner>
double table_integral(const SpectralDensityModel& model, const Weight& weight, const Inner& g,
                      double t, const quad::Tolerance& tol, const char* what) {
    const double h = t > 0.0 ? std::min(kPi / t, 2.0) : 2.0;
    std::vector<double> pts;
    const auto& table = model.table;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const double a = table[i].first, b = table[i + 1].first;
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
        for (int j = 0; j < pieces; ++j) pts.push_back(a + (b - a) * j / pieces);
    }
    pts.push_back(table.back().first);
    auto full = [&](double w) { return weight(w) * g(w); };
    const quad::Result r = quad::integrate(full, pts, tol);
    check_result(r, what);
    return r.value / kPi;
}

double r_weight_check_table(const SpectralDensityModel& model) {
    if (model.table.front().first == 0.0 && model.table.front().second > 0.0) {
        throw NumericalError("eta(0) > 0: thermal kernel integrand is not integrable at w = 0");
    }
    return 0.0;
}

double kernel_quadrature(KernelId id, double t, const SpectralDensityModel& model,
                         const ThermalParams& th, const quad::Tolerance& tol) {
    const bool real = is_real_part(id);
    const double beta = th.beta_s;
    auto g = [id, t](double w) { return inner(id, w, t); };
    if (!model.is_ohmic()) {
        if (real) {
            r_weight_check_table(model);
            auto weight = [&](double w) { return eta_e_of_omega(model, w) / std::tanh(0.5 * w * beta); };
            return table_integral(model, weight, g, t, tol, "kernel_K");
        }
        auto weight = [&](double w) { return eta_e_of_omega(model, w); };
        return table_integral(model, weight, g, t, tol, "kernel_K");
    }
    const double gamma = model.gamma_s;
    auto smooth = [id](double w) { return inner_smooth(id, w); };
    if (real) {
        auto weight = [gamma, beta](double w) { return 2.0 * gamma / (w * w + 1.0) * omega_coth(w, beta); };
        return ohmic_integral(weight, g, smooth, t, std::max(10.0, 40.0 / beta), tol, "kernel_K");
    }
    auto weight = [gamma](double w) { return 2.0 * gamma * w / (w * w + 1.0); };
    return ohmic_integral(weight, g, smooth, t, 10.0, tol, "kernel_K");
}

}  // namespace

double G_steady(FKind kind, double beta) {
    if (!(beta > 0.0)) throw DomainError("beta_s must be positive");
    switch (kind) {
        case FKind::F0: return 2.0 / beta;
        case FKind::F2: return 2.0 / beta - beta / 6.0;
        default: {
            const double a = beta / (2.0 * kPi);
            return -2.0 / kPi * kEulerGamma - (2.0 * digamma(a) + 1.0 / a) / kPi;
        }
    }
}

double G(FKind kind, const ThermalParams& th, double t) {
    th.validate();
    require_time(t);
    if (t == 0.0) return 0.0;
    const int p = power_of(kind);
    auto f = [kind, p, t](double nu) { return E(kind, nu * t) / std::pow(nu, p); };
    auto df = [kind, p, t](double nu) {
        return t * E_derivative(kind, nu * t) / std::pow(nu, p) - p * E(kind, nu * t) / std::pow(nu, p + 1);
    };
    return matsubara_sum(f, df, th, t, G_steady(kind, th.beta_s), -1.0);
}

double eta_I_of_t(const SpectralDensityModel& model, double t, KernelMethod method) {
    model.validate();
    require_time(t);
    if (model.is_ohmic() && method == KernelMethod::ClosedForm) return model.gamma_s * std::exp(-t);
    if (model.is_ohmic() && model.gamma_s == 0.0) return 0.0;
    const quad::Tolerance tol{1e-19, 1e-12, 20000};
    auto g = [t](double w) { return std::sin(w * t); };
    if (!model.is_ohmic()) {
        auto weight = [&](double w) { return eta_e_of_omega(model, w); };
        return table_integral(model, weight, g, t, tol, "eta_I");
    }
    if (t == 0.0) throw DomainError("eta_I quadrature at t_s = 0 is not uniformly convergent; use the closed form");
    const double gamma = model.gamma_s;
    auto weight = [gamma](double w) { return 2.0 * gamma * w / (w * w + 1.0); };
    return ohmic_integral(weight, g, [](double) { return 0.0; }, t, 10.0, tol, "eta_I");
}

double eta_R_of_t(const SpectralDensityModel& model, const ThermalParams& th, double t,
                  KernelMethod method) {
    model.validate();
    th.validate();
    require_time(t);
    if (model.is_ohmic() && model.gamma_s == 0.0) return 0.0;
    const double beta = th.beta_s;
    if (model.is_ohmic() && t == 0.0) {
        throw DomainError("eta_R(0) diverges for the Ohmic-Drude density");
    }
    if (model.is_ohmic() && method == KernelMethod::ClosedForm) {
        auto f = [t](double nu) { return nu * std::exp(-nu * t); };
        auto df = [t](double nu) { return (1.0 - nu * t) * std::exp(-nu * t); };
        return model.gamma_s * matsubara_sum(f, df, th, t);
    }
    const quad::Tolerance tol{1e-19, 1e-12, 20000};
    auto g = [t](double w) { return std::cos(w * t); };
    if (!model.is_ohmic()) {
        r_weight_check_table(model);
        auto weight = [&](double w) { return eta_e_of_omega(model, w) / std::tanh(0.5 * w * beta); };
        return table_integral(model, weight, g, t, tol, "eta_R");
    }
    const double gamma = model.gamma_s;
    auto weight = [gamma, beta](double w) { return 2.0 * gamma / (w * w + 1.0) * omega_coth(w, beta); };
    return ohmic_integral(weight, g, [](double) { return 0.0; }, t, std::max(10.0, 40.0 / beta), tol,
                          "eta_R");
}

double kernel_K(KernelId id, double t, const SpectralDensityModel& model, const ThermalParams& th,
                const KernelOptions& opt) {
    model.validate();
    th.validate();
    require_time(t);
    if (t == 0.0) return 0.0;
    if (model.is_ohmic() && model.gamma_s == 0.0) return 0.0;
    if (!model.is_ohmic() || opt.method == KernelMethod::Quadrature) {
        return kernel_quadrature(id, t, model, th, opt.tol);
    }
    const double g = model.gamma_s;
    switch (id) {
        case KernelId::KI0: return g * F(FKind::F0, t);
        case KernelId::KI1: return g * F(FKind::F1, t);
        case KernelId::KI2: return 2.0 * g * F(FKind::F2, t);
        case KernelId::KI1Tilde: return g * F(FKind::F1Tilde, t);
        case KernelId::KR0: return g * G(FKind::F0, th, t);
        case KernelId::KR1: return g * G(FKind::F1, th, t);
        case KernelId::KR2: return kr2_prefactor(opt.convention) * g * G(FKind::F2, th, t);
        case KernelId::KR1Tilde: return g * G(FKind::F1Tilde, th, t);
    }
    return 0.0;
}

KernelValues kernels_at(double t, const SpectralDensityModel& model, const ThermalParams& th,
                        const KernelOptions& opt) {
    KernelValues v;
    v.KI0 = kernel_K(KernelId::KI0, t, model, th, opt);
    v.KI1 = kernel_K(KernelId::KI1, t, model, th, opt);
    v.KI2 = kernel_K(KernelId::KI2, t, model, th, opt);
    v.KR0 = kernel_K(KernelId::KR0, t, model, th, opt);
    v.KR1 = kernel_K(KernelId::KR1, t, model, th, opt);
    v.KR2 = kernel_K(KernelId::KR2, t, model, th, opt);
    v.KI1_tilde = kernel_K(KernelId::KI1Tilde, t, model, th, opt);
    v.KR1_tilde = kernel_K(KernelId::KR1Tilde, t, model, th, opt);
    return v;
}

KernelTrack kernel_track(const std::vector<double>& grid, const SpectralDensityModel& model,
                         const ThermalParams& th, const KernelOptions& opt) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError("kernel grid must be strictly increasing");
    }
    KernelTrack track;
    track.grid = grid;
    const std::size_t n = grid.size();
    for (auto* a : {&track.KI0, &track.KI1, &track.KI2, &track.KR0, &track.KR1, &track.KR2,
                    &track.KI1_tilde, &track.KR1_tilde}) {
        a->resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const KernelValues v = kernels_at(grid[i], model, th, opt);
        track.KI0[i] = v.KI0;
        track.KI1[i] = v.KI1;
        track.KI2[i] = v.KI2;
        track.KR0[i] = v.KR0;
        track.KR1[i] = v.KR1;
        track.KR2[i] = v.KR2;
        track.KI1_tilde[i] = v.KI1_tilde;
        track.KR1_tilde[i] = v.KR1_tilde;
    }
    return track;
}

double drive_eta_c(double t, double q0, double cross_gamma_s) {
    require_time(t);
    return 2.0 * cross_gamma_s * q0 * std::exp(-t);
}

}  // namespace gqfpe
