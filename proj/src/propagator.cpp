#include "gqfpe/propagator.hpp"

#include <cmath>
#include <sstream>

#include "gqfpe/errors.hpp"

namespace gqfpe {

void PropagationConfig::validate() const {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (!(t_end >= dt)) throw DomainError("t_end must be >= dt");
    if (!(gamma_s >= 0.0)) throw DomainError("gamma_s must be >= 0");
    if (!(beta_s > 0.0)) throw DomainError("beta_s must be positive");
    if (record_every < 1) throw DomainError("record_every must be >= 1");
}

int PropagationConfig::steps() const { return static_cast<int>(std::ceil(t_end / dt - 1e-9)); }

Observables observables(const MatrixXc& rho, const Operators& ops, const BandedOperator* H, bool with_min_eig) {
    Observables o;
    o.trace = rho.trace().real();
    o.q_mean = ops.q.trace_product(rho).real();
    o.p_mean = ops.p.trace_product(rho).real();
    o.q2 = ops.q2.trace_product(rho).real();
    o.p2 = ops.p2.trace_product(rho).real();
    MatrixXc prho;
    ops.p.apply_left(rho, prho);
    MatrixXc qrho;
    ops.q.apply_left(rho, qrho);
    o.qp_sym = 0.5 * (ops.q.trace_product(prho) + ops.p.trace_product(qrho)).real();
    o.purity = (rho.array() * rho.transpose().array()).sum().real();
    o.hermiticity = hermiticity_defect(rho);
    if (with_min_eig) {
        const MatrixXc herm = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(herm, Eigen::EigenvaluesOnly);
        o.min_eig = es.eigenvalues().minCoeff();
    }
    if (H) o.energy = H->trace_product(rho).real();
    return o;
}

namespace {

struct CachedStage {
    HamiltonianTerms h;
    DissipatorTerms d;
};

}  // namespace

Trajectory propagate(const MatrixXc& rho0, const BasisSpec& basis, const PropagationConfig& cfg,
                     const PotentialModel& potential, const StepObserver& observer) {
    cfg.validate();
    basis.validate();
    if (rho0.rows() != basis.dim || rho0.cols() != basis.dim) throw DomainError("rho0 does not match the basis");
    const Operators ops = build_operators(basis);
    const BandedOperator V = potential_matrix(potential, ops);
    const int n_steps = cfg.steps();
    const double h = cfg.t_end / n_steps;

    ThermalParams th;
    th.beta_s = cfg.beta_s;
    th.matsubara_tol = cfg.matsubara_tol;
    // coefficients on the half-step grid used by the RK4 stages
    std::vector<CachedStage> cache(2 * static_cast<std::size_t>(n_steps) + 1);
    for (std::size_t k = 0; k < cache.size(); ++k) {
        const double t = 0.5 * h * static_cast<double>(k);
        const CoefficientSample c = coefficient_at(t, cfg.gamma_s, th, cfg.convention);
        cache[k].h = hamiltonian_terms(t, c.r_m, cfg.gamma_s, cfg.q0, cfg.cross_gamma_s);
        cache[k].d = {cfg.gamma_s, c.Gamma, c.R_pq, c.R_qq, c.R_pp};
    }
    auto hamiltonian = [&](std::size_t k) { return effective_hamiltonian(cache[k].h, V, ops); };

    Trajectory traj;
    traj.steps = n_steps;
    MatrixXc rho = rho0;
    const double trace0 = 1.0;
    auto record = [&](int step) {
        const BandedOperator H = hamiltonian(2 * static_cast<std::size_t>(step));
        Observables o = observables(rho, ops, cfg.track_energy ? &H : nullptr, cfg.track_min_eig);
        o.t_s = step * h;
        if (cfg.track_min_eig) {
            traj.min_eigenvalue = std::isnan(traj.min_eigenvalue) ? o.min_eig : std::min(traj.min_eigenvalue, o.min_eig);
        }
        traj.records.push_back(o);
    };
    record(0);
    if (observer) observer(0.0, rho);

    MatrixXc k1, k2, k3, k4, stage;
    LiouvillianWorkspace work;
    for (int step = 0; step < n_steps; ++step) {
        const std::size_t base = 2 * static_cast<std::size_t>(step);
        const BandedOperator H0 = hamiltonian(base);
        const BandedOperator Hm = hamiltonian(base + 1);
        const BandedOperator H1 = hamiltonian(base + 2);
        liouvillian_apply(H0, cache[base].d, ops, rho, k1, work);
        stage = rho + (0.5 * h) * k1;
        liouvillian_apply(Hm, cache[base + 1].d, ops, stage, k2, work);
        stage = rho + (0.5 * h) * k2;
        liouvillian_apply(Hm, cache[base + 1].d, ops, stage, k3, work);
        stage = rho + h * k3;
        liouvillian_apply(H1, cache[base + 2].d, ops, stage, k4, work);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (cfg.symmetrize) rho = (0.5 * (rho + rho.adjoint())).eval();

        const double drift = std::abs(rho.trace().real() - trace0);
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        traj.max_hermiticity = std::max(traj.max_hermiticity, hermiticity_defect(rho));
        if (!rho.allFinite() || drift > cfg.trace_abort) {
            std::ostringstream msg;
            msg << "propagation unstable at t_s = " << (step + 1) * h << ": trace drift " << drift;
            throw InstabilityError(msg.str(), drift);
        }
        if ((step + 1) % cfg.record_every == 0 || step + 1 == n_steps) record(step + 1);
        if (observer) observer((step + 1) * h, rho);
    }
    traj.final_rho = rho;
    return traj;
}

}  // namespace gqfpe
