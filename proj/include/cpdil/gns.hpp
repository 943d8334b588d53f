#pragma once

#include <vector>

#include "cpdil/channel.hpp"
#include "cpdil/strongcomm.hpp"

namespace cpdil {

/// GNS bimodule E = M (x)_Theta M over M_n, in quotient coordinates.
///
/// Spanning family: matrix-unit simple tensors E_a (x) E_b, index a*n^2 + b
/// (units ordered E_00, E_01, ..., row major). M-valued inner product
/// <a (x) b, c (x) d> = b* Theta(a* c) d, scalarized by the normalized trace
/// tau = tr/n, which is faithful, so module null vectors are exactly scalar
/// Gram null vectors. coords maps spanning coefficients isometrically onto C^rank.
struct GnsModule {
    int n = 0;
    Channel theta;
    CMatrix gram;         // scalarized, n^4 x n^4
    CMatrix coords;       // rank x n^4
    CMatrix coords_pinv;  // n^4 x rank, min-norm lift
    int rank = 0;
    std::vector<cplx> xi;  // spanning coefficients of the cyclic vector 1 (x) 1
};

/// Build the module; verifies <xi, a xi> = Theta(a) on matrix units (throws
/// WitnessResidual if the cyclic identity fails numerically). Enforces n <= 3.
GnsModule gns_module(const Channel& theta, double rel_tol = 1e-10);

/// M-valued inner product of two spanning coefficient vectors.
CMatrix gns_mvalued_inner(const GnsModule& e, const std::vector<cplx>& x,
                          const std::vector<cplx>& y);

/// Balanced tensor product E (x)_M F collapsed to the three-fold space
/// M (x)_Theta M (x)_Phi M. Spanning index ((a*n^2) + b)*n^2 + c;
/// <a(x)b(x)c, a'(x)b'(x)c'> = c* Phi(b* Theta(a* a') b') c'.
struct GnsTensor {
    int n = 0;
    Channel theta;  // inner (left-leg) map
    Channel phi;    // outer (right-leg) map
    CMatrix gram;
    CMatrix coords;
    CMatrix coords_pinv;
    int rank = 0;
    std::vector<cplx> xi_eta;  // 1 (x) 1 (x) 1
};

GnsTensor module_tensor(const GnsModule& e, const GnsModule& f, double rel_tol = 1e-10);

CMatrix tensor_mvalued_inner(const GnsTensor& t, const std::vector<cplx>& x,
                             const std::vector<cplx>& y);

/// Left action of E_{ij} on the a-leg / right action on the c-leg, as maps on
/// quotient coordinates.
CMatrix tensor_left_action(const GnsTensor& t, int i, int j);
CMatrix tensor_right_action(const GnsTensor& t, int i, int j);

struct FlipWitnessResult {
    CMatrix w;  // rank x rank map: E(x)F coordinates -> F(x)E coordinates
    double constraint_residual = 0.0;  // bimodule + cyclic-exchange equations
    double unitarity_defect = 0.0;
};

/// Solve for the unitary bimodule map w: E (x) F -> F (x) E with
/// w(xi (x) eta) = eta (x) xi, by least squares over the bimodule-intertwining
/// constraints with alternating unitary refinement. Throws NotCommuting when the
/// channel-level precondition fails, Infeasible when no unitary solution exists
/// within tol, DimTooLarge when the quotient rank exceeds the solver cap.
FlipWitnessResult flip_witness(const Channel& theta, const Channel& phi, double tol = 1e-9);

/// The flip induced by the Kraus-level certificate, transported onto the same
/// quotient coordinates through the isometries a(x)b(x)c -> (E_a T_i E_b S_j E_c).
CMatrix flip_from_kraus(const Channel& theta, const Channel& phi, const FlipUnitary& wu,
                        const GnsTensor& ef, const GnsTensor& fe);

}  // namespace cpdil
