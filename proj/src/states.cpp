#include "gqfpe/states.hpp"

#include <cmath>
#include <sstream>

#include "gqfpe/errors.hpp"
#include "gqfpe/special_functions.hpp"

namespace gqfpe {

namespace {

ProjectedState finish(MatrixXc rho, double max_leakage) {
    const double kept = rho.trace().real();
    ProjectedState out;
    out.leakage = 1.0 - kept;
    if (out.leakage > max_leakage) {
        std::ostringstream msg;
        msg << "basis too small: truncation leakage " << out.leakage << " exceeds " << max_leakage;
        throw NumericalError(msg.str(), out.leakage);
    }
    out.rho = rho / kept;
    return out;
}

double coth(double x) { return std::isinf(x) ? 1.0 : 1.0 / std::tanh(x); }

}  // namespace

RealMatrix<double> oscillator_wavefunctions(int n, double omega, const RealVector<double>& x) {
    RealMatrix<double> psi(n, x.size());
    const double s = std::sqrt(2.0 * omega);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        double prev = 0.0;
        double cur = std::pow(omega / kPi, 0.25) * std::exp(-0.5 * omega * x(j) * x(j));
        psi(0, j) = cur;
        for (int k = 0; k + 1 < n; ++k) {
            const double next = s * x(j) * cur / std::sqrt(k + 1.0) - std::sqrt(k / (k + 1.0)) * prev;
            prev = cur;
            cur = next;
            psi(k + 1, j) = cur;
        }
    }
    return psi;
}

ProjectedState gaussian_state(const BasisSpec& basis, const GaussianMoments& m, double max_leakage) {
    basis.validate();
    const double a = m.q_var, b = m.p_var, c = m.qp_cov;
    if (!(a > 0.0) || !(b > 0.0) || a * b - c * c < 0.25 * (1.0 - 1e-12)) {
        throw DomainError("Gaussian moments violate the uncertainty relation");
    }
    const int n = basis.dim;
    const double w = basis.omega_ref;
    const double span = std::max(std::sqrt((2.0 * n + 1.0) / w) + 4.0 / std::sqrt(w),
                                 std::abs(m.q_mean) + 10.0 * std::sqrt(a));
    const double dx0 = 0.05 / std::sqrt(std::max(w, 1.0));
    const int pts = 2 * static_cast<int>(std::ceil(span / dx0)) + 1;
    const double dx = 2.0 * span / (pts - 1);
    RealVector<double> x(pts);
    for (int i = 0; i < pts; ++i) x(i) = -span + i * dx;
    const RealMatrix<double> psi = oscillator_wavefunctions(n, w, x);

    // position kernel rho(x, x') = N(xbar; q, a) exp(i mu(xbar) delta - s delta^2 / 2)
    const double s = b - c * c / a;
    MatrixXc kernel(pts, pts);
    const double norm = 1.0 / std::sqrt(2.0 * kPi * a);
    for (int j = 0; j < pts; ++j) {
        for (int i = 0; i < pts; ++i) {
            const double xbar = 0.5 * (x(i) + x(j));
            const double delta = x(i) - x(j);
            const double mu = m.p_mean + c / a * (xbar - m.q_mean);
            const double u = xbar - m.q_mean;
            const double mag = norm * std::exp(-0.5 * u * u / a - 0.5 * s * delta * delta);
            kernel(i, j) = std::polar(mag, mu * delta);
        }
    }
    const MatrixXc psic = psi.cast<Complex>();
    MatrixXc rho = (psic * kernel * psic.transpose()) * (dx * dx);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return finish(std::move(rho), max_leakage);
}

ProjectedState initial_state_thermal(double beta, double omega_g, const BasisSpec& basis, double max_leakage) {
    if (!(beta > 0.0)) throw DomainError("beta_s must be positive");
    if (!(omega_g > 0.0)) throw DomainError("omega_g must be positive");
    basis.validate();
    if (omega_g == basis.omega_ref) {
        // Boltzmann populations in the eigenbasis
        const double ratio = std::exp(-beta * omega_g);
        MatrixXc rho = MatrixXc::Zero(basis.dim, basis.dim);
        double pop = -std::expm1(-beta * omega_g);
        for (int k = 0; k < basis.dim; ++k) {
            rho(k, k) = pop;
            pop *= ratio;
        }
        return finish(std::move(rho), max_leakage);
    }
    GaussianMoments m;
    const double ct = coth(0.5 * beta * omega_g);
    m.q_var = ct / (2.0 * omega_g);
    m.p_var = omega_g * ct / 2.0;
    return gaussian_state(basis, m, max_leakage);
}

ProjectedState coherent_state(const BasisSpec& basis, double q_mean, double p_mean, double max_leakage) {
    GaussianMoments m;
    m.q_mean = q_mean;
    m.p_mean = p_mean;
    m.q_var = 0.5 / basis.omega_ref;
    m.p_var = 0.5 * basis.omega_ref;
    return gaussian_state(basis, m, max_leakage);
}

}  // namespace gqfpe
