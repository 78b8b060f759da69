#include "gqfpe/wigner.hpp"

#include <cmath>

#include "gqfpe/errors.hpp"
#include "gqfpe/special_functions.hpp"
#include "gqfpe/states.hpp"

namespace gqfpe {

namespace {

double uniform_step(const std::vector<double>& v, const char* name) {
    if (v.size() < 2) throw DomainError(std::string(name) + " grid needs at least two points");
    const double h = (v.back() - v.front()) / (v.size() - 1);
    if (!(h > 0.0)) throw DomainError(std::string(name) + " grid must be increasing");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i] - (v.front() + h * i)) > 1e-9 * std::max(1.0, std::abs(v[i]))) {
            throw DomainError(std::string(name) + " grid must be uniform");
        }
    }
    return h;
}

double trapezoid_weight(std::size_t i, std::size_t n) { return i == 0 || i + 1 == n ? 0.5 : 1.0; }

}  // namespace

WignerGrid WignerGrid::uniform(double q_min, double q_max, int nq, double p_min, double p_max, int np) {
    if (nq < 2 || np < 2 || !(q_max > q_min) || !(p_max > p_min)) throw DomainError("invalid Wigner grid");
    WignerGrid g;
    for (int i = 0; i < nq; ++i) g.q.push_back(q_min + (q_max - q_min) * i / (nq - 1));
    for (int j = 0; j < np; ++j) g.p.push_back(p_min + (p_max - p_min) * j / (np - 1));
    return g;
}

WignerResult wigner(const MatrixXc& rho, const BasisSpec& basis, const WignerGrid& grid) {
    basis.validate();
    if (rho.rows() != basis.dim || rho.cols() != basis.dim) throw DomainError("wigner: dimension mismatch");
    const double hq = uniform_step(grid.q, "q");
    const double hp = uniform_step(grid.p, "p");

    // y step divides hq/2 so that q +- y always lands on one fine grid
    const int refine = std::max(1, static_cast<int>(std::ceil(hq / 2.0 / 0.05)));
    const double dy = hq / (2.0 * refine);
    const double w = basis.omega_ref;
    const double support = std::sqrt((2.0 * basis.dim + 1.0) / w) + 6.0 / std::sqrt(w);
    const double x_lo = std::min(grid.q.front(), 0.0) - support;
    const double x_hi = std::max(grid.q.back(), 0.0) + support;
    // fine grid anchored on q.front()
    const long i_lo = static_cast<long>(std::floor((x_lo - grid.q.front()) / dy));
    const long i_hi = static_cast<long>(std::ceil((x_hi - grid.q.front()) / dy));
    const long nx = i_hi - i_lo + 1;
    RealVector<double> x(nx);
    for (long i = 0; i < nx; ++i) x(i) = grid.q.front() + (i_lo + i) * dy;
    const MatrixXc psi = oscillator_wavefunctions(basis.dim, w, x).cast<Complex>();
    const MatrixXc phi = rho * psi;  // column k: rho psi(x_k)

    const std::size_t nq = grid.q.size(), np = grid.p.size();
    const long ny = static_cast<long>(std::ceil(2.0 * support / dy));
    WignerResult out;
    out.grid = grid;
    out.W.setZero(nq, np);
    MatrixXc slices(nq, 2 * ny + 1);
    for (std::size_t iq = 0; iq < nq; ++iq) {
        const long center = static_cast<long>(iq) * 2 * refine - i_lo;
        for (long j = -ny; j <= ny; ++j) {
            const long lo = center - j, hi = center + j;
            // <q - y|rho|q + y> = psi(q - y)^T rho psi(q + y)
            slices(iq, j + ny) = (lo < 0 || hi < 0 || lo >= nx || hi >= nx)
                                     ? Complex(0.0)
                                     : Complex(psi.col(lo).transpose() * phi.col(hi));
        }
    }
    MatrixXc phase(2 * ny + 1, np);
    for (std::size_t ip = 0; ip < np; ++ip) {
        for (long j = -ny; j <= ny; ++j) phase(j + ny, ip) = std::polar(1.0, 2.0 * grid.p[ip] * j * dy);
    }
    out.W = (slices * phase).real() * (dy / kPi);
    double total = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < np; ++j) {
            total += trapezoid_weight(i, nq) * trapezoid_weight(j, np) * out.W(i, j);
        }
    }
    out.integral = total * hq * hp;
    out.coverage_warning = std::abs(out.integral - rho.trace().real()) > 1e-3;
    return out;
}

}  // namespace gqfpe
