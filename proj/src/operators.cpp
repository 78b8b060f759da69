#include "gqfpe/operators.hpp"

#include <algorithm>
#include <cmath>

#include "gqfpe/errors.hpp"

namespace gqfpe {

void BasisSpec::validate() const {
    if (dim < 2) throw DomainError("basis dim must be >= 2");
    if (!(omega_ref > 0.0)) throw DomainError("omega_ref must be positive");
}

void PotentialModel::validate() const {
    if (!(omega_e > 0.0)) throw DomainError("omega_e must be positive");
    if (kind == Kind::Quartic && !(quartic >= 0.0)) throw DomainError("quartic coefficient must be >= 0");
}

BandedOperator BandedOperator::from_dense(const MatrixXc& m, double drop) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw DomainError("banded operator needs a square matrix");
    BandedOperator op(n);
    for (int k = -(n - 1); k < n; ++k) {
        const int len = n - std::abs(k);
        const int r0 = std::max(0, -k);
        VectorXc d(len);
        for (int l = 0; l < len; ++l) d(l) = m(r0 + l, r0 + l + k);
        if (d.cwiseAbs().maxCoeff() > drop) op.diags_[k] = d;
    }
    return op;
}

int BandedOperator::bandwidth() const {
    int b = 0;
    for (const auto& [k, d] : diags_) b = std::max(b, std::abs(k));
    return b;
}

VectorXc& BandedOperator::diagonal(int offset) {
    auto it = diags_.find(offset);
    if (it == diags_.end()) {
        it = diags_.emplace(offset, VectorXc::Zero(n_ - std::abs(offset))).first;
    }
    return it->second;
}

BandedOperator& BandedOperator::add(const BandedOperator& other, Complex scale) {
    if (other.n_ != n_) throw DomainError("banded operator dimension mismatch");
    for (const auto& [k, d] : other.diags_) diagonal(k) += scale * d;
    return *this;
}

BandedOperator& BandedOperator::add_identity(Complex scale) {
    diagonal(0).array() += scale;
    return *this;
}

MatrixXc BandedOperator::dense() const {
    MatrixXc m = MatrixXc::Zero(n_, n_);
    for (const auto& [k, d] : diags_) {
        const int r0 = std::max(0, -k);
        for (int l = 0; l < d.size(); ++l) m(r0 + l, r0 + l + k) = d(l);
    }
    return m;
}

void BandedOperator::apply_left(const MatrixXc& rho, MatrixXc& out, Complex scale, bool accumulate) const {
    if (rho.rows() != n_) throw DomainError("apply_left: dimension mismatch");
    if (!accumulate) out.setZero(n_, rho.cols());
    const Eigen::Index cols = rho.cols();
    for (const auto& [k, d] : diags_) {
        const int r0 = std::max(0, -k);
        const int len = static_cast<int>(d.size());
        const VectorXc sd = scale * d;
        // rows r0.. of A*rho take rows r0+k.. of rho
        for (Eigen::Index j = 0; j < cols; ++j) {
            out.col(j).segment(r0, len).array() += sd.array() * rho.col(j).segment(r0 + k, len).array();
        }
    }
}

void BandedOperator::apply_right(const MatrixXc& rho, MatrixXc& out, Complex scale, bool accumulate) const {
    if (rho.cols() != n_) throw DomainError("apply_right: dimension mismatch");
    if (!accumulate) out.setZero(rho.rows(), n_);
    for (const auto& [k, d] : diags_) {
        const int r0 = std::max(0, -k);
        const int len = static_cast<int>(d.size());
        // column j = i + k of rho*A collects A(i, i+k) rho(:, i)
        for (int l = 0; l < len; ++l) out.col(r0 + k + l) += (scale * d(l)) * rho.col(r0 + l);
    }
}

Complex BandedOperator::trace_product(const MatrixXc& rho) const {
    Complex acc = 0.0;
    for (const auto& [k, d] : diags_) {
        const int r0 = std::max(0, -k);
        for (int l = 0; l < d.size(); ++l) acc += d(l) * rho(r0 + l + k, r0 + l);
    }
    return acc;
}

Operators build_operators(const BasisSpec& basis) {
    basis.validate();
    const int n = basis.dim;
    const int padded = n + 4;
    const double w = basis.omega_ref;
    MatrixXc a = MatrixXc::Zero(padded, padded);
    for (int k = 1; k < padded; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    const MatrixXc ad = a.adjoint();
    const MatrixXc q = (a + ad) / std::sqrt(2.0 * w);
    const MatrixXc p = Complex(0.0, 1.0) * std::sqrt(0.5 * w) * (ad - a);
    const MatrixXc q2 = q * q;
    const MatrixXc q3 = q2 * q;
    const MatrixXc q4 = q2 * q2;
    const MatrixXc p2 = p * p;

    auto cut = [n](const MatrixXc& m) { return BandedOperator::from_dense(m.topLeftCorner(n, n), 1e-300); };
    Operators ops;
    ops.basis = basis;
    ops.q = cut(q);
    ops.p = cut(p);
    ops.q2 = cut(q2);
    ops.p2 = cut(p2);
    ops.q3 = cut(q3);
    ops.q4 = cut(q4);
    return ops;
}

BandedOperator potential_matrix(const PotentialModel& pot, const Operators& ops) {
    pot.validate();
    const double d = pot.shift;
    const double k = 0.5 * pot.omega_e * pot.omega_e;
    BandedOperator v(ops.basis.dim);
    // (q - d)^2 = q^2 - 2 d q + d^2
    v.add(ops.q2, k).add(ops.q, -2.0 * d * k).add_identity(k * d * d);
    if (pot.kind == PotentialModel::Kind::Quartic && pot.quartic != 0.0) {
        const double l = pot.quartic;
        v.add(ops.q4, l)
            .add(ops.q3, -4.0 * d * l)
            .add(ops.q2, 6.0 * d * d * l)
            .add(ops.q, -4.0 * d * d * d * l)
            .add_identity(l * d * d * d * d);
    }
    return v;
}

HamiltonianTerms hamiltonian_terms(double t, double r_m, double gamma, double q0, double cross_gamma) {
    if (!(r_m > 0.0)) throw EffectiveMassError("effective mass is not positive", t, NAN);
    HamiltonianTerms h;
    h.r_m = r_m;
    h.counterterm = gamma * std::exp(-t);
    h.drive = 2.0 * cross_gamma * q0 * std::exp(-t);
    return h;
}

BandedOperator effective_hamiltonian(const HamiltonianTerms& terms, const BandedOperator& potential,
                                     const Operators& ops) {
    if (!(terms.r_m > 0.0)) throw EffectiveMassError("effective mass is not positive", NAN, NAN);
    BandedOperator h = potential;
    h.add(ops.p2, 0.5 / terms.r_m);
    if (terms.counterterm != 0.0) h.add(ops.q2, terms.counterterm);
    if (terms.drive != 0.0) h.add(ops.q, -terms.drive);
    return h;
}

void liouvillian_apply(const BandedOperator& H, const DissipatorTerms& c, const Operators& ops,
                       const MatrixXc& rho, MatrixXc& out, LiouvillianWorkspace& w) {
    const int n = ops.basis.dim;
    if (rho.rows() != n || rho.cols() != n || H.dim() != n) {
        throw DomainError("liouvillian_apply: dimension mismatch");
    }
    const Complex I(0.0, 1.0);
    H.apply_left(rho, out, -I);
    H.apply_right(rho, out, I, true);
    const double g = c.gamma_s;
    if (g == 0.0 && c.R_qq == 0.0) return;

    // Y = [p, rho]
    ops.p.apply_left(rho, w.y);
    ops.p.apply_right(rho, w.y, -1.0, true);
    // X = -i g Gamma {p, rho} + g R_pq [p, rho] - g^2 R_pp [q, rho]
    const Complex cp = -I * g * c.Gamma + g * c.R_pq;
    const Complex cm = -I * g * c.Gamma - g * c.R_pq;
    ops.p.apply_left(rho, w.x, cp);
    ops.p.apply_right(rho, w.x, cm, true);
    ops.q.apply_left(rho, w.x, -g * g * c.R_pp, true);
    ops.q.apply_right(rho, w.x, g * g * c.R_pp, true);
    // + [q, X] - R_qq [p, Y]
    ops.q.apply_left(w.x, out, 1.0, true);
    ops.q.apply_right(w.x, out, -1.0, true);
    ops.p.apply_left(w.y, out, -c.R_qq, true);
    ops.p.apply_right(w.y, out, c.R_qq, true);
}

MatrixXc liouvillian_apply(const BandedOperator& H, const DissipatorTerms& d, const Operators& ops,
                           const MatrixXc& rho) {
    MatrixXc out;
    LiouvillianWorkspace w;
    liouvillian_apply(H, d, ops, rho, out, w);
    return out;
}

}  // namespace gqfpe
