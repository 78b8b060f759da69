#include <doctest.h>

#include <cmath>

#include "gqfpe/errors.hpp"
#include "gqfpe/oracle.hpp"

using namespace gqfpe;
using doctest::Approx;

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }

QuadraticHamiltonian small_system(double gamma_s, double shift, int modes = 16) {
    const auto bath = discretize_bath(SpectralDensityModel::ohmic_drude(gamma_s), modes, 20.0);
    return system_bath_hamiltonian(1.0, shift, bath.omega, bath.c_e);
}

}  // namespace

TEST_CASE("bath discretisation") {
    const double g = 0.1;
    const auto bath = discretize_bath(SpectralDensityModel::ohmic_drude(g), 256, 30.0);
    CHECK(bath.n_modes() == 256);
    CHECK(bath.kappa() == Approx(4.0 * g / M_PI * std::atan(30.0)).epsilon(1e-12));
    const auto wide = discretize_bath(SpectralDensityModel::ohmic_drude(g), 256, 200.0);
    CHECK(std::abs(wide.kappa() / (2.0 * g) - 1.0) < 0.01);
    for (int a = 1; a < bath.n_modes(); ++a) CHECK(bath.omega(a) > bath.omega(a - 1));
    CHECK(bath.omega(255) < 30.0);

    const auto decoupled = discretize_bath(SpectralDensityModel::ohmic_drude(0.0), 32, 30.0);
    CHECK(decoupled.c_e.cwiseAbs().maxCoeff() == 0.0);
    CHECK(decoupled.c_g.cwiseAbs().maxCoeff() == 0.0);
    const auto grounded = discretize_bath(SpectralDensityModel::ohmic_drude(g), 32, 30.0, 0.025);
    CHECK((grounded.c_g - 0.5 * grounded.c_e).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(discretize_bath(SpectralDensityModel::ohmic_drude(g), 4, 30.0), DomainError);
    CHECK_THROWS_AS(discretize_bath(SpectralDensityModel::ohmic_drude(g), 64, 5.0), DomainError);
}

TEST_CASE("system-bath Hamiltonian") {
    const auto h = small_system(0.1, 1.5);
    CHECK((h.hessian - h.hessian.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // completed square: the coupled minimum is the displaced system at the relaxed bath
    CHECK((h.hessian * h.minimum).cwiseAbs().maxCoeff() == Approx(1.5));
    const Eigen::VectorXd force = h.hessian * h.minimum;
    CHECK(force(0) == Approx(1.5));
    CHECK(force.tail(force.size() - 1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("thermal Gaussian states") {
    QuadraticHamiltonian one;
    one.hessian = Eigen::MatrixXd::Constant(1, 1, 2.25);
    one.minimum = Eigen::VectorXd::Constant(1, 0.3);
    const auto s = thermal_state(one, 0.7);
    CHECK(s.mean(0) == Approx(0.3));
    CHECK(s.mean(1) == 0.0);
    CHECK(s.cov(0, 0) == Approx(coth(0.7 * 1.5 / 2) / (2 * 1.5)).epsilon(1e-14));
    CHECK(s.cov(1, 1) == Approx(1.5 * coth(0.7 * 1.5 / 2) / 2).epsilon(1e-14));
    CHECK(s.cov(0, 1) == Approx(0.0));

    const auto hot = thermal_state(one, 1e-3);
    CHECK(hot.cov(0, 0) == Approx(1.0 / (1e-3 * 2.25)).epsilon(1e-6));

    const auto nu = symplectic_eigenvalues(thermal_state(small_system(0.2, 0.0), 2.0).cov);
    CHECK(nu.minCoeff() >= 0.5);
    CHECK_THROWS_AS(thermal_state(one, 0.0), DomainError);
}

TEST_CASE("exact Gaussian flow") {
    const auto h = small_system(0.2, 1.0);
    const auto hg = small_system(0.2, 0.0);
    const auto start = thermal_state(hg, 1.5);
    const SymplecticFlow flow(h);

    const auto same = flow.evolve(start, 0.0);
    CHECK((same.mean - start.mean).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((same.cov - start.cov).cwiseAbs().maxCoeff() < 1e-12);

    const auto later = flow.evolve(start, 7.3);
    CHECK(later.cov.determinant() == Approx(start.cov.determinant()).epsilon(1e-8));
    const Eigen::VectorXd nu0 = symplectic_eigenvalues(start.cov), nu1 = symplectic_eigenvalues(later.cov);
    CHECK((nu0 - nu1).cwiseAbs().maxCoeff() < 1e-9);

    const int n = h.hessian.rows();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n).setIdentity();
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd S = flow.matrix(2.1);
    CHECK((S * J * S.transpose() - J).cwiseAbs().maxCoeff() < 1e-11);

    const auto m = flow.mode_moments(start, 7.3, 0);
    const auto r = reduced_moments(later, 0);
    CHECK(m.q_mean == Approx(r.q_mean).epsilon(1e-10));
    CHECK(m.p_mean == Approx(r.p_mean).epsilon(1e-10));
    CHECK(m.q_var + m.q_mean * m.q_mean == Approx(r.q2).epsilon(1e-10));
    CHECK(m.p_var + m.p_mean * m.p_mean == Approx(r.p2).epsilon(1e-10));
    CHECK(m.qp_cov + m.q_mean * m.p_mean == Approx(r.qp_sym).epsilon(1e-9));
    CHECK(evolve_gaussian(start, h, 7.3).mean(0) == Approx(later.mean(0)));
    CHECK_THROWS_AS(flow.evolve(start, -1.0), DomainError);
    CHECK_THROWS_AS(reduced_moments(later, n), DomainError);
}

TEST_CASE("decoupled oracle is a displaced oscillator") {
    OracleConfig cfg;
    cfg.gamma_s = 0.0;
    cfg.beta_s = 0.8;
    cfg.shift = 1.0;
    cfg.n_modes = 32;
    std::vector<double> times;
    for (int k = 0; k <= 40; ++k) times.push_back(0.25 * k);
    const auto recs = oracle_trajectory(cfg, times);
    const double v = coth(0.4) / 2;
    for (const auto& r : recs) {
        const double q = 1.0 - std::cos(r.t_s), p = std::sin(r.t_s);
        CHECK(r.moments.q_mean == Approx(q).epsilon(1e-12));
        CHECK(r.moments.p_mean == Approx(p).epsilon(1e-12));
        CHECK(r.moments.q2 == Approx(v + q * q).epsilon(1e-12));
        CHECK(r.moments.p2 == Approx(v + p * p).epsilon(1e-12));
        CHECK(r.moments.qp_sym == Approx(q * p).epsilon(1e-12));
        CHECK(r.purity == Approx(std::tanh(0.4)).epsilon(1e-12));
    }
}

TEST_CASE("coupled oracle") {
    OracleConfig cfg;
    cfg.gamma_s = 0.1;
    cfg.beta_s = 1.0;
    cfg.shift = 1.0;
    const std::vector<double> times{0.0, 5.0, 10.0, 100.0};
    const auto recs = oracle_trajectory(cfg, times);
    CHECK(recs[0].moments.q_mean == Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(recs[0].moments.p_mean) < 1e-12);
    CHECK(recs[0].purity == Approx(std::tanh(0.5)).epsilon(1e-12));
    // relaxation toward the displaced minimum
    CHECK(std::abs(recs[3].moments.q_mean - 1.0) < 0.02);
    for (const auto& r : recs) CHECK(r.purity <= 1.0);

    OracleConfig grounded = cfg;
    grounded.ground_gamma_s = 0.1;
    // system-bath correlations in the initial state lower the reduced purity
    CHECK(oracle_trajectory(grounded, {0.0})[0].purity < std::tanh(0.5) - 1e-3);

    cfg.n_modes = 1024;
    const auto fine = oracle_trajectory(cfg, times);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(fine[k].moments.q_mean - recs[k].moments.q_mean) < 1e-3);
        CHECK(std::abs(fine[k].moments.q2 - recs[k].moments.q2) < 1e-3);
    }

    cfg.beta_s = -1.0;
    CHECK_THROWS_AS(oracle_trajectory(cfg, times), DomainError);
}
