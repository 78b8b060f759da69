#pragma once

#include <map>

#include "gqfpe/types.hpp"

namespace gqfpe {

struct BasisSpec {
    int dim = 64;
    double omega_ref = 1.0;

    void validate() const;
};

/// Square matrix stored by diagonals; products with dense matrices cost O(N^2 * bands).
class BandedOperator {
public:
    explicit BandedOperator(int dim = 0) : n_(dim) {}

    static BandedOperator from_dense(const MatrixXc& m, double drop = 0.0);

    int dim() const { return n_; }
    int bandwidth() const;
    const std::map<int, VectorXc>& diagonals() const { return diags_; }

    /// A(i, i + offset); entries are indexed by local position along the diagonal.
    VectorXc& diagonal(int offset);

    BandedOperator& add(const BandedOperator& other, Complex scale = 1.0);
    BandedOperator& add_identity(Complex scale);
    MatrixXc dense() const;

    /// out = (accumulate ? out : 0) + scale * A * rho
    void apply_left(const MatrixXc& rho, MatrixXc& out, Complex scale = 1.0, bool accumulate = false) const;
    /// out = (accumulate ? out : 0) + scale * rho * A
    void apply_right(const MatrixXc& rho, MatrixXc& out, Complex scale = 1.0, bool accumulate = false) const;

    /// Tr(A rho)
    Complex trace_product(const MatrixXc& rho) const;

private:
    int n_;
    std::map<int, VectorXc> diags_;
};

struct Operators {
    BasisSpec basis;
    BandedOperator q, p, q2, p2, q3, q4;
};

/// Ladder-operator construction of q and p, with exact powers truncated from a padded basis.
Operators build_operators(const BasisSpec& basis);

struct PotentialModel {
    enum class Kind { Harmonic, Quartic };
    Kind kind = Kind::Harmonic;
    double omega_e = 1.0;
    double shift = 0.0;
    double quartic = 0.0;

    void validate() const;
    bool harmonic() const { return kind == Kind::Harmonic || quartic == 0.0; }
};

/// V_e(q) = omega_e^2 (q - d)^2 / 2 + lambda (q - d)^4
BandedOperator potential_matrix(const PotentialModel& potential, const Operators& ops);

struct HamiltonianTerms {
    double r_m = 1.0;
    double counterterm = 0.0;  // kappa_e/2 - K_I^(0)(t) = gamma_s e^{-t}
    double drive = 0.0;        // eta_c(t) for the representative path
};

HamiltonianTerms hamiltonian_terms(double t_s, double r_m, double gamma_s, double q0, double cross_gamma_s);

/// H(t) = p^2/(2 r_m) + V_e(q) + counterterm q^2 - drive q
BandedOperator effective_hamiltonian(const HamiltonianTerms& terms, const BandedOperator& potential,
                                     const Operators& ops);

struct DissipatorTerms {
    double gamma_s = 0.0;
    double Gamma = 0.0;
    double R_pq = 0.0;
    double R_qq = 0.0;
    double R_pp = 0.0;
};

struct LiouvillianWorkspace {
    MatrixXc a, b, x, y;
};

/// d rho/dt = -i[H, rho] - i g Gamma [q,{p,rho}] + g R_pq [q,[p,rho]] - g^2 R_pp [q,[q,rho]] - R_qq [p,[p,rho]]
void liouvillian_apply(const BandedOperator& H, const DissipatorTerms& d, const Operators& ops,
                       const MatrixXc& rho, MatrixXc& out, LiouvillianWorkspace& work);

MatrixXc liouvillian_apply(const BandedOperator& H, const DissipatorTerms& d, const Operators& ops,
                           const MatrixXc& rho);

}  // namespace gqfpe
