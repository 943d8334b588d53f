#pragma once

#include <optional>
#include <vector>

#include "cpdil/cmatrix.hpp"

namespace cpdil {

/// Ordered minimal Kraus family T_1..T_m realizing a map a -> sum T_i a T_i*.
struct KrausFamily {
    std::vector<CMatrix> ops;
    int rank() const { return int(ops.size()); }
};

/// A completely positive map on M_n(C), held as its Choi matrix with a lazily
/// extracted minimal Kraus family.
///
/// Conventions (fixed; every other module depends on them):
///   vec is column-major: vec(T)[j*n + i] = T(i, j).
///   choi = sum_{ij} E_ij (x) Theta(E_ij) = sum_t vec(T_t) vec(T_t)*,
///   so choi[(p*n + i), (q*n + k)] = sum_t T_t(i, p) conj(T_t(k, q)).
class Channel {
public:
    /// Build from Kraus operators (not necessarily minimal).
    static Channel from_kraus(const std::vector<CMatrix>& ops);
    /// Build from a Choi matrix; throws NotCP if its min eigenvalue < -tol.
    static Channel from_choi(const CMatrix& choi, double tol = 1e-9);
    /// Build from a superoperator acting on column-major vec coordinates.
    static Channel from_superop(const CMatrix& s, double tol = 1e-9);
    static Channel identity(int n);

    int dim() const { return n_; }
    const CMatrix& choi() const { return choi_; }

    CMatrix apply(const CMatrix& a) const;
    /// Predual action: rho -> sum T_i* rho T_i, so tr(dual(rho) a) = tr(rho apply(a)).
    CMatrix apply_dual(const CMatrix& rho) const;
    /// Superoperator on column-major vec coordinates: vec(apply(a)) = superop() vec(a).
    CMatrix superop() const;

    /// Minimal family: rank = Choi rank at the relative threshold, vec-orthogonal
    /// ops with |vec(T_t)|^2 equal to the Choi eigenvalues.
    const KrausFamily& minimal_kraus(double rel_tol = 1e-10) const;

    /// this after other: apply(compose(other), a) = apply(this, apply(other, a)).
    Channel compose(const Channel& other) const;

    bool is_cp(double tol = 1e-9) const;
    double choi_min_eig() const;
    bool is_contractive(double tol = 1e-9) const;
    bool is_unital(double tol = 1e-9) const;
    bool is_endomorphism(double tol = 1e-9) const;

private:
    Channel(int n, CMatrix choi) : n_(n), choi_(std::move(choi)) {}

    int n_;
    CMatrix choi_;
    mutable std::optional<KrausFamily> kraus_;
};

/// True iff the compositions agree at the Choi level: |choi(TP) - choi(PT)|_F <= tol.
bool commute_check(const Channel& theta, const Channel& phi, double tol = 1e-9);
double commutation_defect(const Channel& theta, const Channel& phi);

/// Schatten-1 norm (sum of singular values).
double trace_norm(const CMatrix& a);

}  // namespace cpdil
