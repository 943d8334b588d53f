#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cpdil/prodsys.hpp"

namespace cpdil {

/// Regular Toeplitz kernel over the truncated dyadic grid: for a signed index
/// d = (dk, dm), Phi(d) = Ttilde_{d-}* Ttilde_{d+} : X(d+) (x) H -> X(d-) (x) H,
/// where d+/d- are the componentwise positive/negative parts.
struct ToeplitzKernel {
    int level = 0;
    int radius = 0;
    GridSystem system;
    std::map<std::pair<int, int>, CMatrix> blocks;

    const CMatrix& block(int dk, int dm) const;
};

/// Assemble Phi(d) for every d whose positive and negative parts both fit in the
/// system horizon. Requires radius <= horizon.
ToeplitzKernel build_kernel(const GridSystem& system, int radius);

struct PdReport {
    double min_eig = 0.0;
    bool pass = false;
    std::vector<cplx> witness;  // Gram eigenvector on failure, empty otherwise
};

/// Assemble the Gram form of the kernel over positive-quadrant grid functions
/// (|index|_1 <= radius) and report its minimum eigenvalue.
PdReport check_pd(const ToeplitzKernel& kernel, double tol);

/// Kolmogorov space of a positive-definite kernel: coordinates for the quotient
/// of finitely supported functions, with H embedded at the origin and creation
/// operators acting by index translation within the truncation.
class DilationSpace {
public:
    int n_h = 0;      // dim H
    int level = 0;
    int radius = 0;
    int dim_k = 0;    // Gram rank
    GridSystem system;
    std::vector<std::pair<int, int>> points;  // positive quadrant, |p|_1 <= radius
    std::vector<int> offsets;                 // block offsets into H_0
    int dim_h0 = 0;
    CMatrix gram;         // H_0 Gram
    CMatrix coords;       // dim_k x dim_h0
    CMatrix coords_pinv;  // dim_h0 x dim_k
    CMatrix iota;         // dim_k x n_h embedding of H

    /// Vtilde_s : X(s) (x) K -> K (index translation by s, truncation-dropped).
    const CMatrix& creation(int k, int m) const;
    /// alpha_s(b) = Vtilde_s (I (x) b) Vtilde_s*. The declared domain is
    /// |s|_1 + depth(b) <= radius; outside it throws OutOfHorizon.
    CMatrix alpha(int k, int m, const CMatrix& b, int depth_b) const;
    CMatrix beta(int k, const CMatrix& b, int depth_b) const { return alpha(k, 0, b, depth_b); }
    CMatrix gamma(int m, const CMatrix& b, int depth_b) const { return alpha(0, m, b, depth_b); }
    /// Projection of K onto the embedded H.
    CMatrix proj_h() const { return iota * iota.adjoint(); }

private:
    mutable std::map<std::pair<int, int>, CMatrix> creation_cache_;
};

/// Throws NotPD when the Gram fails positive semidefiniteness.
DilationSpace kolmogorov(const ToeplitzKernel& kernel);

struct DilationTheoremReport {
    double compat_residual = 0.0;       // P_H V(x)|_H = T(x) on all fiber bases
    double compression_residual = 0.0;  // P_{X(d-)(x)H} V(d)|_{X(d+)(x)H} = Phi(d)
    double annihilation_residual = 0.0; // P_H V(x)|_{K - H} = 0
    int span_rank = 0;                  // rank of span{V(x)h}
    int dim_k = 0;
    bool pass = false;
};

DilationTheoremReport verify_dilation_theorem(const DilationSpace& ds, double tol);

struct DilationEqReport {
    double max_residual = 0.0;       // || P_s(p b p) - p alpha_s(b) p ||
    double coinvariance_norm = 0.0;  // || p alpha_s(1 - p) p ||
    bool pass = false;
};

/// Dilation equation over all grid points against the supplied probes on K,
/// plus the coinvariance of the embedded H.
DilationEqReport verify_dilation_eq(const DilationSpace& ds, const CpSemigroup& r,
                                    const CpSemigroup& s, const std::vector<CMatrix>& probes,
                                    double tol);

struct MinimalityReport {
    int monomial_rank = 0;      // closure of alpha_t(B(H))-monomials applied to H
    int partition_rank = 0;     // same with alpha_(s,t) evaluated as beta_s(gamma_t(.))
    int dim_k = 0;
    bool central_support_full = false;
    double unit_deficit = 0.0;        // max 1 - <alpha_t(1) h, h> at unit grid steps
    bool unit_deficit_monotone = false;
    double monotonicity_margin = 0.0;  // min eig of compressed alpha_t(1)-alpha_s(1), t <= s
    bool pass = false;
};

MinimalityReport verify_minimality(const DilationSpace& ds, double tol);

struct CrossLevelReport {
    double max_residual = 0.0;
    bool pass = false;
};

/// Kernel built one level finer, compressed through the per-factor Kraus-product
/// coefficient maps, reproduces the coarse kernel blockwise.
CrossLevelReport cross_level_check(const CpSemigroup& r, const CpSemigroup& s, int coarse_level,
                                   int radius, double tol);

}  // namespace cpdil
