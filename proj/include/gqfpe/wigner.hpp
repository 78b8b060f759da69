#pragma once

#include <vector>

#include "gqfpe/operators.hpp"

namespace gqfpe {

struct WignerGrid {
    std::vector<double> q, p;

    static WignerGrid uniform(double q_min, double q_max, int nq, double p_min, double p_max, int np);
    static WignerGrid standard() { return uniform(-8.0, 8.0, 161, -8.0, 8.0, 161); }
};

struct WignerResult {
    WignerGrid grid;
    RealMatrix<double> W;   // W(i, j) at (q[i], p[j])
    double integral = 0.0;  // trapezoid estimate of the phase-space integral
    bool coverage_warning = false;
};

/// W(q, p) = (1/pi) int dy e^{2ipy} <q - y|rho|q + y>
WignerResult wigner(const MatrixXc& rho, const BasisSpec& basis, const WignerGrid& grid);

}  // namespace gqfpe
