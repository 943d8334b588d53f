#pragma once

#include <map>
#include <memory>
#include <vector>

#include "cpdil/channel.hpp"

namespace cpdil {

/// Exact dyadic rational num / 2^log2den, kept reduced so it can key maps.
struct Dyadic {
    long long num = 0;
    int log2den = 0;

    Dyadic() = default;
    Dyadic(long long num, int log2den);

    double value() const;
    bool is_zero() const { return num == 0; }
    Dyadic operator+(const Dyadic& o) const;
    bool operator<(const Dyadic& o) const;
    bool operator==(const Dyadic& o) const { return num == o.num && log2den == o.log2den; }
};

/// Generator of a one-parameter CP-semigroup: L(a) = G* a + a G + sum L_j* a L_j.
/// Dissipation D = G + G* + sum L_j* L_j <= 0 makes the semigroup contractive;
/// D = 0 makes it unital.
struct Generator {
    int dim = 0;
    CMatrix G;
    std::vector<CMatrix> jumps;

    CMatrix dissipation() const;
    /// Largest eigenvalue of the dissipation (<= tol for admissibility).
    double dissipation_excess() const;
};

class CpSemigroup {
public:
    explicit CpSemigroup(Generator gen);

    int dim() const { return gen_.dim; }
    const Generator& generator() const { return gen_; }
    /// Superoperator of the generator on column-major vec coordinates.
    const CMatrix& superop_gen() const { return superL_; }

    /// Sample at a nonnegative real time.
    Channel at(double t) const;
    /// Sample at an exact dyadic time, memoized by the exact rational.
    const Channel& at(const Dyadic& t) const;

private:
    Generator gen_;
    CMatrix superL_;
    mutable std::map<std::pair<long long, int>, Channel> cache_;
};

/// {k / 2^level : 0 <= k <= count}; count steps past zero.
std::vector<Dyadic> dyadic_grid(int level, int count);

struct LawReport {
    double max_residual = 0.0;
    bool pass = false;
};

/// Max over pairs (s, t) from the grid of |choi(at(s+t)) - choi(at(s) o at(t))|_F.
LawReport verify_semigroup_law(const CpSemigroup& sg, const std::vector<Dyadic>& grid, double tol);

struct ContinuityReport {
    double modulus = 0.0;           // max step-to-neighbor displacement observed
    double refined_modulus = 0.0;   // same at one refinement level deeper
    double certified_bound = 0.0;   // e^{|L| T} |L| delta |a| |h| envelope
    bool pass = false;              // refined <= 0.75 * modulus (or below noise)
};

/// Joint-continuity probe for P_(s,t) = R_s o S_t along a dyadic grid: reports the
/// modulus over neighboring grid points against probe operators/vectors, its value
/// under one refinement, and a Lipschitz-type certified bound dominating both.
ContinuityReport verify_continuity(const CpSemigroup& r, const CpSemigroup& s, int level,
                                   int count, const std::vector<CMatrix>& probe_ops,
                                   const std::vector<std::vector<cplx>>& probe_vecs);

}  // namespace cpdil
