#pragma once

#include <utility>
#include <vector>

#include "cpdil/cmatrix.hpp"

namespace cpdil {

struct EigResult {
    std::vector<double> eigenvalues;  // descending
    CMatrix eigenvectors;             // unitary, columns match eigenvalues
};

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
/// Throws NotHermitian if ||A - A*||_F > tol.
EigResult herm_eig(const CMatrix& a, double tol = 1e-9);

double psd_min_eig(const CMatrix& a, double tol = 1e-9);

enum class KernelPolicy { identity_completion };

/// Unitary polar factor of a square matrix. On the support of X*X it satisfies
/// X = U (X*X)^{1/2}; on the kernel it maps the kernel basis onto a cokernel
/// basis in index order.
CMatrix polar_unitary(const CMatrix& x, KernelPolicy policy = KernelPolicy::identity_completion);

/// Matrix exponential, scaling-and-squaring with a series core.
CMatrix expm(const CMatrix& a);

/// Rank at a relative eigenvalue threshold (eigs <= rel_tol * max are null).
int gram_rank(const CMatrix& gram, double rel_tol = 1e-10);

/// Moore-Penrose inverse of a Hermitian matrix via its eigendecomposition.
CMatrix pinv_hermitian(const CMatrix& a, double rel_tol = 1e-12);

/// Moore-Penrose inverse of a general matrix, via (A*A)^+ A*.
CMatrix pinv(const CMatrix& a, double rel_tol = 1e-12);

}  // namespace cpdil
