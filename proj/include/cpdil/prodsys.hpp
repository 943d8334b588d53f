#pragma once

#include <vector>

#include "cpdil/channel.hpp"
#include "cpdil/semigroup.hpp"
#include "cpdil/strongcomm.hpp"

namespace cpdil {

/// One-step fiber: the minimal Kraus family of the step channel with its
/// declared-orthonormal coordinate system.
struct KrausFiber {
    Dyadic step;
    std::vector<CMatrix> ops;
    int rank() const { return int(ops.size()); }
    /// Coordinates -> operator on H, sum of coeff[i] * ops[i].
    CMatrix realize(const std::vector<cplx>& coeffs) const;
};

/// Fiber at grid index (k, m): E^{(x)k} (x) F^{(x)m} in the product basis,
/// E factors ordered before F factors, indices major-to-minor left to right.
struct GridFiber {
    int k = 0, m = 0;
    int dim = 1;
    std::vector<CMatrix> basis_ops;  // realized basis: T_{i1}..T_{ik} S_{j1}..S_{jm}
    CMatrix ttilde;                  // n x (dim*n) block row [op_0 | op_1 | ...]
};

/// Dyadic-level two-parameter product system generated by the step fibers,
/// with flips and concatenation multiplication maps.
struct GridSystem {
    int n = 0;
    int level = 0;
    int horizon = 0;
    KrausFiber e_step, f_step;
    CMatrix phi;  // step flip: E (x) F -> F (x) E coordinates

    const GridFiber& fiber(int k, int m) const;
    /// phi_{k,m}: E^k (x) F^m -> F^m (x) E^k, built from the step flip.
    CMatrix flip(int k, int m) const;
    /// Multiplication X(k,m) (x) X(k2,m2) -> X(k+k2, m+m2):
    /// I_{E^k} (x) phi_{k2,m}^{-1} (x) I_{F^{m2}} followed by concatenation.
    CMatrix multiplication(int k, int m, int k2, int m2) const;

    std::vector<GridFiber> fibers_;  // index k*(horizon+1)+m
};

/// Assemble all fibers with k+m <= horizon from the level-step channels of the
/// two semigroups, with the flip induced by the certificate u.
GridSystem build_system(const CpSemigroup& r, const CpSemigroup& s, int level, int horizon,
                        const FlipUnitary& u);

/// Same assembly from explicit step Kraus families (for fixtures whose steps are
/// not exponentials of a generator, e.g. nilpotent conjugations).
GridSystem build_system_from_steps(const KrausFiber& e_step, const KrausFiber& f_step, int level,
                                   int horizon, const CMatrix& step_flip);

struct ProdsysReport {
    double max_defect = 0.0;
    bool pass = false;
};

/// max over fibers (k,m) and probes a of || Ttilde (I (x) a) Ttilde* - R_k S_m(a) ||,
/// together with the representation property across the multiplication maps
/// (T(x.y) = T(x)T(y)), which is where a wrong flip certificate shows up.
ProdsysReport verify_rep_identity(const GridSystem& sys, const CpSemigroup& r,
                                  const CpSemigroup& s, const std::vector<CMatrix>& probes,
                                  double tol);

/// || T^E_k (I (x) T^F_m) - T^F_m (I (x) T^E_k)(phi_{k,m} (x) I_H) || over the grid.
ProdsysReport verify_commutation_relation(const GridSystem& sys, double tol);

/// Both parenthesizations of the multiplication maps agree on all in-horizon
/// triples of grid indices.
ProdsysReport verify_associativity(const GridSystem& sys, double tol);

}  // namespace cpdil
