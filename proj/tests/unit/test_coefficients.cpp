#include <doctest.h>

#include <cmath>
#include <random>

#include "gqfpe/coefficients.hpp"
#include "gqfpe/errors.hpp"

using namespace gqfpe;
using doctest::Approx;

namespace {

ThermalParams at_beta(double b) {
    ThermalParams th;
    th.beta_s = b;
    return th;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// r_m, Gamma, R_pq, R_qq, R_pp from a separate numpy evaluation of the Matsubara series
struct Ref {
    double t, gamma, beta;
    KR2Convention conv;
    double r_m, Gamma, R_pq, R_qq, R_pp;
};
const Ref kRef[] = {
    {2.0, 0.1, 1.0, KR2Convention::Derived, 0.93533528323661275, 0.92444360034331363, 1.4782713088096122,
     0.067975446101398468, 14.762996517606412},
    {2.0, 0.1, 1.0, KR2Convention::Printed, 0.93533528323661275, 0.92444360034331363, 1.5958232485098736,
     0.033987723050699234, 14.6613535029605},
    {5.0, 0.1, 0.5, KR2Convention::Derived, 0.8249304038966162, 1.265314807847558, 2.857773274546731,
     0.50381169054581454, 31.574617801252298},
};

}  // namespace

TEST_CASE("coefficients against an independent series evaluation") {
    for (const auto& r : kRef) {
        const auto s = coefficient_at(r.t, r.gamma, at_beta(r.beta), r.conv);
        CHECK(rel(s.r_m, r.r_m) < 1e-13);
        CHECK(rel(s.Gamma, r.Gamma) < 1e-13);
        CHECK(rel(s.R_pq, r.R_pq) < 1e-9);
        CHECK(rel(s.R_qq, r.R_qq) < 1e-9);
        CHECK(rel(s.R_pp, r.R_pp) < 1e-9);
        CHECK(rel(s.D, 4 * r.R_pp * r.R_qq - r.R_pq * r.R_pq - r.Gamma * r.Gamma) < 1e-8);
    }
}

TEST_CASE("trivial limits") {
    const auto zero = coefficient_at(0.0, 0.1, at_beta(1.0));
    CHECK(zero.Gamma == 0.0);
    CHECK(zero.R_pq == 0.0);
    CHECK(zero.R_qq == 0.0);
    CHECK(zero.R_pp == 0.0);
    CHECK(zero.D == 0.0);
    CHECK(zero.r_m == 1.0);

    const auto steady = coefficient_steady(0.1, at_beta(0.5));
    CHECK(steady.Gamma == Approx(1.25).epsilon(1e-15));
    CHECK(steady.r_m == Approx(0.8).epsilon(1e-15));
    CHECK(coefficient_at(200.0, 0.1, at_beta(0.5)).r_m == 0.8);

    const auto off = coefficient_at(3.0, 0.0, at_beta(1.0));
    CHECK(off.Gamma == 0.0);
    CHECK(off.R_pp == 0.0);
    CHECK(off.D == 0.0);
    CHECK(off.r_m == 1.0);
}

TEST_CASE("effective mass error names the critical damping") {
    try {
        coefficient_at(10.0, 0.6, at_beta(1.0));
        FAIL("expected an effective-mass error");
    } catch (const EffectiveMassError& e) {
        CHECK(e.critical_gamma_s == Approx(0.5 / (1.0 - 61.0 * std::exp(-10.0))));
    }
    CHECK_NOTHROW(coefficient_at(10.0, 0.49, at_beta(1.0)));
}

TEST_CASE("kernel identities") {
    for (double t : {0.3, 1.0, 4.0}) {
        for (auto conv : {KR2Convention::Derived, KR2Convention::Printed}) {
            const double g = 0.2, b = 1.5;
            const auto s = coefficient_at(t, g, at_beta(b), conv);
            CHECK(s.alpha == Approx(g * g * s.R_pp).epsilon(1e-12));
            const double kr2 = kr2_prefactor(conv) * g * G_n(2, b, t);
            CHECK(s.R_qq == Approx(kr2 / (2 * s.r_m * s.r_m)).epsilon(1e-12));
            CHECK(s.branch == Approx(kr2 / s.r_m).epsilon(1e-12));
        }
    }
    const auto p = coefficient_at(2.0, 0.1, at_beta(1.0), KR2Convention::Printed);
    CHECK(p.R_qq == Approx(0.1 * G_n(2, 1.0, 2.0) / (2 * p.r_m * p.r_m)).epsilon(1e-10));
}

TEST_CASE("generic kernel form equals the closed form") {
    CHECK(generic_vs_ohmic_check(1.0, 0.1, 1.0) <= 1e-8);
    CHECK(generic_vs_ohmic_check(5.0, 0.1, 0.5) <= 1e-8);
    CHECK(generic_vs_ohmic_check(0.0, 0.1, 0.5) == 0.0);
    CHECK(generic_vs_ohmic_check(2.0, 0.1, 1.0, KernelMethod::Quadrature) <= 1e-8);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.05, 20.0), ug(0.01, 0.3), ub(0.3, 6.0);
    for (int i = 0; i < 20; ++i) CHECK(generic_vs_ohmic_check(ut(rng), ug(rng), ub(rng)) <= 1e-8);
}

TEST_CASE("positivity structure of the coefficient tracks") {
    const auto grid = uniform_grid(20.0, 2000);
    for (double b : {0.5, 1.0}) {
        const auto tr = coefficient_track(grid, 0.1, at_beta(b));
        const auto rep = positivity_report(tr);
        CHECK(tr.samples.front().D == 0.0);
        REQUIRE(rep.sign_changes.size() == 1);
        CHECK(rep.final_sign == 1);
        CHECK(rep.steady_sign == 1);
        CHECK(rep.weak_damping_ok);
        for (const auto& s : tr.samples) {
            if (s.t_s <= 0.0) continue;
            CHECK(s.R_pq > 0.0);
            CHECK(s.R_qq > 0.0);
            CHECK(s.R_pp > 0.0);
        }
    }
    const auto cold = positivity_report(coefficient_track(grid, 0.1, at_beta(5.0)));
    CHECK(cold.negative_throughout);
    CHECK(cold.steady_sign == -1);

    const auto off = positivity_report(coefficient_track(grid, 0.0, at_beta(1.0)));
    CHECK(off.sign_changes.empty());
    CHECK(off.min_D == 0.0);
    CHECK(off.max_D == 0.0);
}

TEST_CASE("grid validation") {
    CHECK(uniform_grid(2.0, 4).size() == 5);
    CHECK(uniform_grid(2.0, 4)[4] == 2.0);
    CHECK_THROWS(coefficient_track({0.5, 1.0}, 0.1, at_beta(1.0)));
}
