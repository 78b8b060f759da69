#include "gqfpe/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gqfpe/errors.hpp"
#include "gqfpe/special_functions.hpp"

namespace gqfpe {

double DiscretizedBath::kappa() const { return (c_e.array().square() / omega.array().square()).sum(); }

DiscretizedBath discretize_bath(const SpectralDensityModel& model, int n_modes, double omega_max,
                                double ground_gamma_s) {
    model.validate();
    if (n_modes < 8) throw DomainError("n_modes must be >= 8");
    if (omega_max < 10.0) throw DomainError("omega_max must be >= 10 omega_c to cover the density");
    DiscretizedBath bath;
    bath.omega.resize(n_modes);
    bath.c_e.resize(n_modes);
    double total = 0.0;
    if (model.is_ohmic()) {
        // int_0^w eta/w' dw' = 2 gamma atan(w)
        const double top = std::atan(omega_max);
        total = 2.0 * model.gamma_s * top;
        for (int a = 0; a < n_modes; ++a) bath.omega(a) = std::tan((a + 0.5) * top / n_modes);
    } else {
        // cumulative weight on a fine grid, inverted by linear interpolation
        const int fine = 200000;
        std::vector<double> w(fine + 1), cum(fine + 1, 0.0);
        for (int i = 0; i <= fine; ++i) w[i] = omega_max * i / fine;
        auto ratio = [&](double x) {
            if (x == 0.0) x = 1e-9 * omega_max;
            return eta_e_of_omega(model, x) / x;
        };
        for (int i = 1; i <= fine; ++i) cum[i] = cum[i - 1] + 0.5 * (ratio(w[i - 1]) + ratio(w[i])) * (w[i] - w[i - 1]);
        total = cum.back();
        if (!(total > 0.0)) {
            for (int a = 0; a < n_modes; ++a) bath.omega(a) = omega_max * (a + 0.5) / n_modes;
        } else {
            std::size_t i = 0;
            for (int a = 0; a < n_modes; ++a) {
                const double target = (a + 0.5) * total / n_modes;
                while (i + 1 < cum.size() && cum[i + 1] < target) ++i;
                const double u = (target - cum[i]) / (cum[i + 1] - cum[i]);
                bath.omega(a) = w[i] + u * (w[i + 1] - w[i]);
            }
        }
    }
    const double slice = total / n_modes;
    for (int a = 0; a < n_modes; ++a) {
        bath.c_e(a) = std::sqrt(2.0 / kPi * slice) * bath.omega(a);
    }
    const double g = model.gamma_s;
    bath.c_g = g > 0.0 ? Eigen::VectorXd(bath.c_e * std::sqrt(ground_gamma_s / g))
                       : Eigen::VectorXd::Zero(n_modes);
    return bath;
}

QuadraticHamiltonian system_bath_hamiltonian(double omega_sys, double shift, const Eigen::VectorXd& omega,
                                             const Eigen::VectorXd& c) {
    const int m = static_cast<int>(omega.size());
    QuadraticHamiltonian h;
    h.hessian = Eigen::MatrixXd::Zero(m + 1, m + 1);
    h.hessian(0, 0) = omega_sys * omega_sys + (c.array().square() / omega.array().square()).sum();
    for (int a = 0; a < m; ++a) {
        h.hessian(0, a + 1) = h.hessian(a + 1, 0) = -c(a);
        h.hessian(a + 1, a + 1) = omega(a) * omega(a);
    }
    h.minimum = Eigen::VectorXd::Zero(m + 1);
    h.minimum(0) = shift;
    for (int a = 0; a < m; ++a) h.minimum(a + 1) = c(a) * shift / (omega(a) * omega(a));
    return h;
}

GaussianState thermal_state(const QuadraticHamiltonian& h, double beta) {
    if (!(beta > 0.0)) throw DomainError("beta_s must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.hessian);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw DomainError("thermal_state: Hessian is not positive definite");
    }
    const int n = static_cast<int>(h.hessian.rows());
    const Eigen::ArrayXd nu = es.eigenvalues().array().sqrt();
    const Eigen::ArrayXd ct = std::isinf(beta) ? Eigen::ArrayXd::Ones(n) : Eigen::ArrayXd(1.0 / (0.5 * beta * nu).tanh());
    const Eigen::MatrixXd& U = es.eigenvectors();
    GaussianState s;
    s.mean = Eigen::VectorXd::Zero(2 * n);
    s.mean.head(n) = h.minimum;
    s.cov = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    s.cov.topLeftCorner(n, n) = U * (ct / (2.0 * nu)).matrix().asDiagonal() * U.transpose();
    s.cov.bottomRightCorner(n, n) = U * (nu * ct / 2.0).matrix().asDiagonal() * U.transpose();
    return s;
}

SymplecticFlow::SymplecticFlow(const QuadraticHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.hessian);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw DomainError("SymplecticFlow: Hessian is not positive definite");
    }
    modes_ = es.eigenvectors();
    frequency_ = es.eigenvalues().array().sqrt();
    minimum_ = h.minimum;
}

Eigen::MatrixXd SymplecticFlow::matrix(double t) const {
    const int n = static_cast<int>(frequency_.size());
    const Eigen::ArrayXd w = frequency_.array();
    const Eigen::ArrayXd c = (w * t).cos(), s = (w * t).sin();
    const Eigen::MatrixXd& U = modes_;
    Eigen::MatrixXd S(2 * n, 2 * n);
    S.topLeftCorner(n, n) = U * c.matrix().asDiagonal() * U.transpose();
    S.topRightCorner(n, n) = U * (s / w).matrix().asDiagonal() * U.transpose();
    S.bottomLeftCorner(n, n) = -U * (w * s).matrix().asDiagonal() * U.transpose();
    S.bottomRightCorner(n, n) = S.topLeftCorner(n, n);
    return S;
}

GaussianState SymplecticFlow::evolve(const GaussianState& state, double t) const {
    if (!(t >= 0.0)) throw DomainError("t_s must be >= 0");
    const int n = static_cast<int>(frequency_.size());
    if (state.mean.size() != 2 * n) throw DomainError("state does not match the Hamiltonian");
    const Eigen::MatrixXd S = matrix(t);
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(2 * n);
    shift.head(n) = minimum_;
    GaussianState out;
    out.mean = S * (state.mean - shift) + shift;
    out.cov = S * state.cov * S.transpose();
    out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
    return out;
}

SymplecticFlow::ModeMoments SymplecticFlow::mode_moments(const GaussianState& state, double t, int index) const {
    const int n = static_cast<int>(frequency_.size());
    const Eigen::ArrayXd w = frequency_.array();
    const Eigen::ArrayXd c = (w * t).cos(), s = (w * t).sin();
    const Eigen::ArrayXd u = modes_.row(index).transpose().array();
    // system rows of the flow matrix
    Eigen::VectorXd qx = modes_ * (u * c).matrix();
    Eigen::VectorXd qp = modes_ * (u * s / w).matrix();
    Eigen::VectorXd px = -(modes_ * (u * w * s).matrix());
    Eigen::VectorXd pp = qx;
    Eigen::VectorXd rq(2 * n), rp(2 * n);
    rq << qx, qp;
    rp << px, pp;
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(2 * n);
    shift.head(n) = minimum_;
    const Eigen::VectorXd dev = state.mean - shift;
    ModeMoments m;
    m.q_mean = rq.dot(dev) + minimum_(index);
    m.p_mean = rp.dot(dev);
    const Eigen::VectorXd cq = state.cov * rq;
    m.q_var = rq.dot(cq);
    m.qp_cov = rp.dot(cq);
    m.p_var = rp.dot(state.cov * rp);
    return m;
}

GaussianState evolve_gaussian(const GaussianState& state, const QuadraticHamiltonian& h, double t) {
    return SymplecticFlow(h).evolve(state, t);
}

ReducedMoments reduced_moments(const GaussianState& state, int index) {
    const int n = state.modes();
    if (index < 0 || index >= n) throw DomainError("reduced_moments: mode index out of range");
    ReducedMoments r;
    r.q_mean = state.mean(index);
    r.p_mean = state.mean(n + index);
    r.q2 = state.cov(index, index) + r.q_mean * r.q_mean;
    r.p2 = state.cov(n + index, n + index) + r.p_mean * r.p_mean;
    r.qp_sym = state.cov(index, n + index) + r.q_mean * r.p_mean;
    return r;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
    const int n = static_cast<int>(cov.rows() / 2);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n).setIdentity();
    J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J * cov, false);
    // eigenvalues come in pairs +- i nu
    std::vector<double> nu;
    for (int k = 0; k < 2 * n; ++k) {
        if (es.eigenvalues()(k).imag() > 0.0) nu.push_back(es.eigenvalues()(k).imag());
    }
    std::sort(nu.begin(), nu.end());
    return Eigen::Map<Eigen::VectorXd>(nu.data(), static_cast<Eigen::Index>(nu.size()));
}

void OracleConfig::validate() const {
    if (!(gamma_s >= 0.0)) throw DomainError("gamma_s must be >= 0");
    if (!(beta_s > 0.0)) throw DomainError("beta_s must be positive");
    if (!(omega_e > 0.0) || !(omega_g > 0.0)) throw DomainError("omega_e and omega_g must be positive");
    if (!(ground_gamma_s >= 0.0)) throw DomainError("ground_gamma_s must be >= 0");
}

std::vector<OracleRecord> oracle_trajectory(const OracleConfig& cfg, const std::vector<double>& times) {
    cfg.validate();
    const DiscretizedBath bath = discretize_bath(SpectralDensityModel::ohmic_drude(cfg.gamma_s), cfg.n_modes,
                                                 cfg.omega_max, cfg.ground_gamma_s);
    const QuadraticHamiltonian hg = system_bath_hamiltonian(cfg.omega_g, 0.0, bath.omega, bath.c_g);
    const QuadraticHamiltonian he = system_bath_hamiltonian(cfg.omega_e, cfg.shift, bath.omega, bath.c_e);
    const GaussianState start = thermal_state(hg, cfg.beta_s);
    const SymplecticFlow flow(he);
    std::vector<OracleRecord> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto m = flow.mode_moments(start, t, 0);
        OracleRecord r;
        r.t_s = t;
        r.moments.q_mean = m.q_mean;
        r.moments.p_mean = m.p_mean;
        r.moments.q2 = m.q_var + m.q_mean * m.q_mean;
        r.moments.p2 = m.p_var + m.p_mean * m.p_mean;
        r.moments.qp_sym = m.qp_cov + m.q_mean * m.p_mean;
        r.purity = 0.5 / std::sqrt(m.q_var * m.p_var - m.qp_cov * m.qp_cov);
        out.push_back(r);
    }
    return out;
}

}  // namespace gqfpe
