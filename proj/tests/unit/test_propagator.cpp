#include <doctest.h>

#include <cmath>

#include "gqfpe/errors.hpp"
#include "gqfpe/propagator.hpp"
#include "gqfpe/states.hpp"
#include "gqfpe/wigner.hpp"

using namespace gqfpe;
using doctest::Approx;

namespace {

MatrixXc random_density(int n, unsigned seed) {
    std::srand(seed);
    const MatrixXc a = MatrixXc::Random(n, n);
    MatrixXc rho = a * a.adjoint();
    return rho / rho.trace();
}

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

TEST_CASE("ladder operators") {
    const Operators two = build_operators({2, 1.0});
    CHECK(std::abs(two.q.dense()(0, 1) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);

    const int n = 24;
    const Operators ops = build_operators({n, 1.7});
    const MatrixXc q = ops.q.dense(), p = ops.p.dense();
    const MatrixXc c = q * p - p * q - Complex(0.0, 1.0) * MatrixXc::Identity(n, n);
    CHECK(c.topLeftCorner(n - 1, n - 1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((q - q.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(q.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.real().cwiseAbs().maxCoeff() == 0.0);
    CHECK((p + p.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::real(ops.q2.dense()(0, 0)) == Approx(1.0 / (2 * 1.7)));
    CHECK((ops.q2.dense() - q * q).topLeftCorner(n - 1, n - 1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("effective Hamiltonian terms") {
    const auto h0 = hamiltonian_terms(0.0, 1.0, 0.1, 0.0, 0.0);
    CHECK(h0.counterterm == Approx(0.1));
    CHECK(h0.drive == 0.0);
    const auto late = hamiltonian_terms(80.0, 0.8, 0.1, 1.0, 0.1);
    CHECK(late.counterterm < 1e-30);
    CHECK(late.drive < 1e-30);
    CHECK(hamiltonian_terms(0.0, 1.0, 0.1, 1.0, 0.1).drive == Approx(0.2));
    CHECK_THROWS_AS(hamiltonian_terms(1.0, 0.0, 0.1, 0.0, 0.0), EffectiveMassError);

    const Operators ops = build_operators({16, 1.0});
    PotentialModel pot;
    const BandedOperator H = effective_hamiltonian({1.0, 0.0, 0.0}, potential_matrix(pot, ops), ops);
    const MatrixXc d = H.dense();
    for (int k = 0; k < 14; ++k) CHECK(std::real(d(k, k)) == Approx(k + 0.5));
}

TEST_CASE("Liouvillian structure") {
    const int n = 20;
    const Operators ops = build_operators({n, 1.0});
    PotentialModel pot;
    pot.shift = 0.7;
    const BandedOperator H = effective_hamiltonian({0.9, 0.05, 0.0}, potential_matrix(pot, ops), ops);
    const MatrixXc rho = random_density(n, 3);
    const DissipatorTerms d{0.1, 1.2, 0.8, 0.3, 5.0};
    const MatrixXc out = liouvillian_apply(H, d, ops, rho);
    CHECK(std::abs(out.trace()) <= 1e-14);
    CHECK(hermiticity_defect(out) <= 1e-13);

    const MatrixXc closed = liouvillian_apply(H, DissipatorTerms{}, ops, rho);
    const MatrixXc Hd = H.dense();
    const MatrixXc vn = Complex(0.0, -1.0) * (Hd * rho - rho * Hd);
    CHECK((closed - vn).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(liouvillian_apply(H, d, ops, MatrixXc::Zero(n - 1, n - 1)), DomainError);
}

TEST_CASE("observables and initial states") {
    const BasisSpec b{40, 1.0};
    const Operators ops = build_operators(b);
    MatrixXc ground = MatrixXc::Zero(40, 40);
    ground(0, 0) = 1.0;
    const auto g = observables(ground, ops);
    CHECK(g.q_mean == 0.0);
    CHECK(g.p_mean == 0.0);
    CHECK(g.q2 == Approx(0.5));
    CHECK(observables(MatrixXc::Identity(40, 40) / 40.0, ops).purity == Approx(1.0 / 40));

    const auto th = initial_state_thermal(1.0, 1.0, b);
    CHECK(observables(th.rho, ops).q2 == Approx(1.0819767068693265).epsilon(1e-12));
    CHECK(std::real(th.rho(3, 3) / th.rho(2, 2)) == Approx(std::exp(-1.0)));
    const auto cold = initial_state_thermal(60.0, 1.0, b);
    CHECK(std::real(cold.rho(0, 0)) == Approx(1.0).epsilon(1e-15));

    // omega_g != omega_ref goes through the Gaussian projection
    const BasisSpec wide{64, 1.0};
    const auto squeezed = initial_state_thermal(0.8, 1.3, wide);
    const auto o = observables(squeezed.rho, build_operators(wide));
    CHECK(o.q2 == Approx(coth(0.4 * 1.3) / (2 * 1.3)).epsilon(1e-8));
    CHECK(o.p2 == Approx(1.3 * coth(0.4 * 1.3) / 2).epsilon(1e-8));
    CHECK_THROWS_AS(initial_state_thermal(0.1, 1.0, {4, 1.0}), NumericalError);

    const auto coh = coherent_state(wide, 1.5, -0.5);
    const auto oc = observables(coh.rho, build_operators(wide));
    CHECK(oc.q_mean == Approx(1.5).epsilon(1e-9));
    CHECK(oc.p_mean == Approx(-0.5).epsilon(1e-9));
    CHECK(oc.purity == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("propagation against the moment equations") {
    // <q>, <p>, <q^2>, <p^2>, <{q,p}>/2 at t_s = 5 from the closed moment hierarchy of the
    // master equation, integrated with DOP853 at rtol 1e-12 (gamma_s 0.1, beta_s 1, d = 1)
    const BasisSpec b{64, 1.0};
    PropagationConfig cfg;
    cfg.gamma_s = 0.1;
    cfg.beta_s = 1.0;
    cfg.t_end = 5.0;
    cfg.dt = 1e-3;
    cfg.record_every = 1000;
    cfg.track_min_eig = false;
    PotentialModel pot;
    pot.shift = 1.0;
    const auto tr = propagate(initial_state_thermal(1.0, 1.0, b).rho, b, cfg, pot);
    const auto& f = tr.records.back();
    CHECK(f.t_s == Approx(5.0));
    CHECK(f.q_mean == Approx(0.707053644749786).epsilon(1e-7));
    CHECK(f.p_mean == Approx(-0.470959154699445).epsilon(1e-7));
    CHECK(f.q2 == Approx(2.05402172231569).epsilon(1e-7));
    CHECK(f.p2 == Approx(1.29997376242863).epsilon(1e-7));
    CHECK(f.qp_sym == Approx(-0.4250596819666015).epsilon(1e-7));
    CHECK(tr.max_trace_drift <= 1e-10);
    CHECK(tr.max_hermiticity <= 1e-10);
    CHECK(tr.records.size() == 6);
}

TEST_CASE("closed harmonic dynamics") {
    const BasisSpec b{48, 1.0};
    PropagationConfig cfg;
    cfg.gamma_s = 0.0;
    cfg.t_end = 2 * 3.14159265358979;
    cfg.dt = 1e-3;
    cfg.record_every = 200;
    cfg.track_min_eig = false;
    PotentialModel pot;
    pot.shift = 1.0;
    const auto tr = propagate(coherent_state(b, 0.0).rho, b, cfg, pot);
    double e_drift = 0.0, p_drift = 0.0;
    for (const auto& o : tr.records) {
        CHECK(o.q_mean == Approx(1.0 - std::cos(o.t_s)).epsilon(1e-8));
        e_drift = std::max(e_drift, std::abs(o.energy - tr.records.front().energy));
        p_drift = std::max(p_drift, std::abs(o.purity - tr.records.front().purity));
    }
    CHECK(e_drift <= 1e-8);
    CHECK(p_drift <= 1e-8);
}

TEST_CASE("basis convergence") {
    PropagationConfig cfg;
    cfg.gamma_s = 0.1;
    cfg.beta_s = 1.0;
    cfg.t_end = 2.0;
    cfg.dt = 2e-3;
    cfg.record_every = 1000;
    cfg.track_min_eig = false;
    PotentialModel pot;
    pot.shift = 1.0;
    const BasisSpec small{48, 1.0}, large{96, 1.0};
    const auto a = propagate(initial_state_thermal(1.0, 1.0, small).rho, small, cfg, pot).records.back();
    const auto c = propagate(initial_state_thermal(1.0, 1.0, large).rho, large, cfg, pot).records.back();
    CHECK(std::abs(a.q_mean - c.q_mean) < 1e-6);
    CHECK(std::abs(a.q2 - c.q2) < 1e-6);
}

TEST_CASE("propagation guards") {
    const BasisSpec b{8, 1.0};
    PropagationConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(propagate(MatrixXc::Identity(8, 8) / 8.0, b, cfg, PotentialModel{}), DomainError);
    cfg.dt = 1e-3;
    CHECK_THROWS_AS(propagate(MatrixXc::Identity(7, 7) / 7.0, b, cfg, PotentialModel{}), DomainError);
    cfg.gamma_s = 0.6;
    cfg.t_end = 10.0;
    CHECK_THROWS_AS(propagate(MatrixXc::Identity(8, 8) / 8.0, b, cfg, PotentialModel{}), EffectiveMassError);
}

TEST_CASE("Wigner function") {
    const BasisSpec b{40, 1.0};
    MatrixXc ground = MatrixXc::Zero(40, 40);
    ground(0, 0) = 1.0;
    const auto w = wigner(ground, b, WignerGrid::standard());
    CHECK(w.integral == Approx(1.0).epsilon(1e-4));
    CHECK(w.W(80, 80) == Approx(1.0 / 3.14159265358979).epsilon(1e-8));
    CHECK_FALSE(w.coverage_warning);

    const auto coh = coherent_state(BasisSpec{64, 1.0}, 2.0);
    const auto wc = wigner(coh.rho, BasisSpec{64, 1.0}, WignerGrid::standard());
    Eigen::Index i, j;
    wc.W.maxCoeff(&i, &j);
    CHECK(wc.grid.q[i] == Approx(2.0));
    CHECK(wc.grid.p[j] == Approx(0.0));
    // analytic coherent-state Wigner function at (2.3, 0.4)
    const double expected = std::exp(-(0.3 * 0.3) - 0.4 * 0.4) / 3.14159265358979;
    const auto one = wigner(coh.rho, BasisSpec{64, 1.0}, WignerGrid::uniform(2.3, 2.4, 2, 0.4, 0.5, 2));
    CHECK(one.W(0, 0) == Approx(expected).epsilon(1e-8));

    const auto narrow = wigner(coh.rho, BasisSpec{64, 1.0}, WignerGrid::uniform(-1, 1, 41, -1, 1, 41));
    CHECK(narrow.coverage_warning);
}
