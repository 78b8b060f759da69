#include <doctest.h>

#include <cmath>
#include <vector>

#include "gqfpe/errors.hpp"
#include "gqfpe/kernels.hpp"
#include "gqfpe/quadrature.hpp"
#include "gqfpe/spectral_density.hpp"

using namespace gqfpe;
using doctest::Approx;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ThermalParams at_beta(double b) {
    ThermalParams th;
    th.beta_s = b;
    return th;
}

// Matsubara series summed term by term to n = 20000 at 30 digits, tail by Euler-Maclaurin.
struct GRef {
    double beta, t, g0, g1, g2, g1t;
};
const GRef kGRef[] = {
    {0.5, 0.5, 1.6245381922328664, 0.35808498635964355, 0.056679716362472941, 0.65515549829156065},
    {0.5, 2, 3.4699840802105576, 2.3311422639245562, 1.2665870677212095, 3.3911741035177852},
    {0.5, 10, 3.999822199466718, 3.9192342174262065, 3.9058208341364326, 3.9281242440903327},
    {1, 0.5, 0.88521226036821674, 0.18194646769194809, 0.028140980270041349, 0.32433255407230556},
    {1, 2, 1.7522700631960861, 1.1071165627717972, 0.59468461231017442, 1.6025802669551109},
    {1, 10, 1.9999168959860042, 1.8493919242023506, 1.8282639884795263, 1.8535471249021925},
    {5, 0.5, 0.41884902872834222, 0.067782828419082783, 0.0093515271905624011, 0.10279952196657959},
    {5, 2, 0.46825106374856156, 0.081311436515324314, -0.0032373278888687378, 0.0054204458035949163},
    {5, 10, 0.40005595723152538, -0.14629620391010812, -0.42990833734993531, -0.14903225049198073},
};

}  // namespace

TEST_CASE("Gauss-Kronrod panel integrates degree-31 polynomials exactly") {
    for (int deg : {0, 5, 17, 31}) {
        const auto r = quad::gauss_kronrod21([deg](double x) { return std::pow(x, deg); }, 0.0, 1.0);
        CHECK(r.value == Approx(1.0 / (deg + 1)).epsilon(1e-15));
    }
}

TEST_CASE("adaptive integration") {
    const auto r = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == Approx(2.0 / 3.0).epsilon(1e-12));
    const auto g = quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0);
    CHECK(g.value == Approx(kPi / 2).epsilon(1e-12));
    // int_1^inf sin(x)/x dx = pi/2 - Si(1)
    const auto s = quad::integrate_oscillatory_tail([](double x) { return std::sin(x) / x; }, 1.0, kPi);
    CHECK(s.value == Approx(0.62471325642771360).epsilon(1e-10));
}

TEST_CASE("Wynn epsilon accelerates the alternating harmonic series") {
    std::vector<double> partial;
    double acc = 0.0;
    for (int k = 1; k <= 20; ++k) {
        acc += (k % 2 ? 1.0 : -1.0) / k;
        partial.push_back(acc);
    }
    CHECK(quad::wynn_epsilon(partial).value == Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("digamma") {
    CHECK(digamma(1.0) == Approx(-kEulerGamma).epsilon(1e-14));
    CHECK(digamma(0.5) == Approx(-kEulerGamma - 2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(digamma(0.07957747154594767) == Approx(-13.019791857333482).epsilon(1e-13));
    CHECK_THROWS_AS(digamma(0.0), DomainError);
}

TEST_CASE("spectral density and counterterm") {
    CHECK(eta_e_of_omega(SpectralDensityModel::ohmic_drude(0.1), 1.0) == Approx(0.1));
    CHECK(eta_e_of_omega(SpectralDensityModel::ohmic_drude(0.1), 0.0) == 0.0);
    CHECK(eta_e_of_omega(SpectralDensityModel::ohmic_drude(0.5), 2.0) == Approx(0.4));
    CHECK_THROWS_AS(eta_e_of_omega(SpectralDensityModel::ohmic_drude(0.1), -1.0), DomainError);
    CHECK(kappa_e(SpectralDensityModel::ohmic_drude(0.1)) == Approx(0.2));
    CHECK(kappa_e(SpectralDensityModel::ohmic_drude(0.25)) == Approx(0.5));
    CHECK_THROWS_AS(SpectralDensityModel::ohmic_drude(-0.1).validate(), DomainError);

    std::vector<std::pair<double, double>> zeros;
    for (int i = 0; i <= 400; ++i) zeros.emplace_back(0.05 * i, 0.0);
    CHECK(kappa_e(SpectralDensityModel::tabulated(zeros)) == 0.0);
    std::vector<std::pair<double, double>> coarse = {{0.0, 0.0}, {0.5, 0.1}, {1.0, 0.1}};
    CHECK_THROWS(SpectralDensityModel::tabulated(coarse).validate());

    BathPair pair;
    pair.excited = SpectralDensityModel::ohmic_drude(0.1);
    pair.ground_gamma_s = 0.1;
    pair.cross_gamma_s = 0.2;
    CHECK_THROWS_AS(pair.validate(), DomainError);
}

TEST_CASE("F functions") {
    CHECK(F_n(0, 1.0) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(F_n(2, 1e-3) == Approx(1.6654171665278075e-10).epsilon(1e-12));
    CHECK(F1_tilde(1e-3) == Approx(9.9916704155002777e-07).epsilon(1e-12));
    for (double t : {0.1, 1.0, 10.0, 40.0}) {
        for (int n = 0; n < 3; ++n) {
            CHECK(F_n(n, t) > F_n(n, 0.5 * t));
            CHECK(1.0 - F_n(n, t) <= std::exp(-t) * (1 + t + t * t / 2) + 1e-16);
        }
    }
}

TEST_CASE("memory functions G against the Matsubara series") {
    for (const auto& r : kGRef) {
        CHECK(rel(G_n(0, r.beta, r.t), r.g0) < 1e-11);
        CHECK(rel(G_n(1, r.beta, r.t), r.g1) < 1e-11);
        CHECK(rel(G_n(2, r.beta, r.t), r.g2) < 1e-10);
        CHECK(rel(G1_tilde(r.beta, r.t), r.g1t) < 1e-10);
    }
}

TEST_CASE("steady values and limits") {
    CHECK(G_n(0, 0.5, 50.0) == Approx(4.0).epsilon(1e-12));
    CHECK(G_steady(FKind::F2, 1.0) == Approx(2.0 - 1.0 / 6.0).epsilon(1e-14));
    for (double t : {0.5, 2.0, 8.0}) {
        for (int n = 0; n < 3; ++n) {
            CHECK(rel(G_n(n, 0.01, t), 200.0 * F_n(n, t)) < 0.01);
        }
    }
}

TEST_CASE("removable cot pole at beta = 2 pi") {
    const double b = 2.0 * kPi;
    for (int n = 0; n < 3; ++n) {
        const double at = G_n(n, b, 1.5);
        const double near = 0.5 * (G_n(n, b - 1e-3, 1.5) + G_n(n, b + 1e-3, 1.5));
        CHECK(std::isfinite(at));
        CHECK(std::abs(at - near) < 1e-6 * std::max(1.0, std::abs(at)));
    }
}

TEST_CASE("kernels: closed form, quadrature and limits") {
    const auto model = SpectralDensityModel::ohmic_drude(0.1);
    const auto th = at_beta(1.0);
    KernelOptions quad_opt;
    quad_opt.method = KernelMethod::Quadrature;
    for (double t : {0.5, 3.0}) {
        const auto c = kernels_at(t, model, th);
        const auto q = kernels_at(t, model, th, quad_opt);
        CHECK(rel(q.KI0, c.KI0) < 1e-8);
        CHECK(rel(q.KI2, c.KI2) < 1e-8);
        CHECK(rel(q.KR0, c.KR0) < 1e-8);
        CHECK(rel(q.KR1, c.KR1) < 1e-8);
        CHECK(rel(q.KR2, c.KR2) < 1e-8);
        CHECK(rel(q.KR1_tilde, c.KR1_tilde) < 1e-8);
        CHECK(rel(q.KI1_tilde, c.KI1_tilde) < 1e-8);
    }
    // direct double integral of s^2 eta_R(s) over [0, 2] (mpmath, beta = 1) per unit gamma
    CHECK(rel(kernel_K(KernelId::KR2, 2.0, model, th) / 0.1, 1.1893692246204211) < 1e-10);

    const auto zero = kernels_at(0.0, model, th);
    for (double v : {zero.KI0, zero.KI1, zero.KI2, zero.KR0, zero.KR1, zero.KR2, zero.KI1_tilde, zero.KR1_tilde}) {
        CHECK(v == 0.0);
    }
    CHECK(kernel_K(KernelId::KI2, 60.0, model, th) == Approx(0.2).epsilon(1e-12));

    KernelOptions printed;
    printed.convention = KR2Convention::Printed;
    CHECK(kernel_K(KernelId::KR2, 2.0, model, th, printed) == Approx(0.1 * 0.59468461231017442).epsilon(1e-10));
}

TEST_CASE("bath correlation functions") {
    const auto model = SpectralDensityModel::ohmic_drude(0.1);
    CHECK(eta_I_of_t(model, 0.0) == Approx(0.1));
    CHECK(eta_I_of_t(model, 1.0) == Approx(0.1 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(eta_I_of_t(model, 60.0) == Approx(0.0).epsilon(1e-20));
    CHECK(rel(eta_I_of_t(model, 1.0, KernelMethod::Quadrature), 0.1 * std::exp(-1.0)) < 1e-8);
    CHECK(rel(eta_R_of_t(model, at_beta(0.01), 1.0), 20.0 * std::exp(-1.0)) < 0.01);
    CHECK(rel(eta_R_of_t(model, at_beta(1.0), 1.0, KernelMethod::Quadrature),
              eta_R_of_t(model, at_beta(1.0), 1.0)) < 1e-8);
    CHECK(eta_R_of_t(SpectralDensityModel::ohmic_drude(0.0), at_beta(1.0), 0.7) == 0.0);
    CHECK_THROWS_AS(eta_R_of_t(model, at_beta(1.0), 0.0), DomainError);
}

TEST_CASE("drive from the cross density") {
    CHECK(drive_eta_c(0.0, 1.0, 0.1) == Approx(0.2));
    CHECK(drive_eta_c(3.0, 0.0, 0.1) == 0.0);
    CHECK(drive_eta_c(60.0, 1.0, 0.1) == Approx(0.0).epsilon(1e-20));
}
