#include "cpdil/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cpdil {

namespace {

// One complex Jacobi rotation zeroing a(p,q); updates a in place and
// accumulates the rotation into q_acc.
void jacobi_rotate(CMatrix& a, CMatrix& q_acc, int p, int q) {
    const cplx apq = a(p, q);
    const double abs_apq = std::abs(apq);
    if (abs_apq == 0.0) return;
    const cplx phase = apq / abs_apq;  // apq = |apq| e^{i phi}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * abs_apq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx sp = s * phase;

    const int n = a.rows();
    // Columns: [p q] <- [p q] * J, with J = [[c, sp],[-conj(sp), c]].
    for (int i = 0; i < n; ++i) {
        const cplx aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip - std::conj(sp) * aiq;
        a(i, q) = sp * aip + c * aiq;
    }
    // Rows: J^* on the left.
    for (int j = 0; j < n; ++j) {
        const cplx apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj - sp * aqj;
        a(q, j) = std::conj(sp) * apj + c * aqj;
    }
    for (int i = 0; i < n; ++i) {
        const cplx qip = q_acc(i, p), qiq = q_acc(i, q);
        q_acc(i, p) = c * qip - std::conj(sp) * qiq;
        q_acc(i, q) = sp * qip + c * qiq;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
}

double offdiag_norm(const CMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigResult herm_eig(const CMatrix& a, double tol) {
    if (!a.square()) throw DimensionMismatch("herm_eig needs a square matrix");
    const double defect = a.herm_defect();
    if (defect > tol) throw NotHermitian(defect);

    const int n = a.rows();
    // Symmetrize so the iteration sees an exactly Hermitian matrix.
    CMatrix w = (a + a.adjoint()) * cplx(0.5);
    CMatrix q = CMatrix::identity(n);

    const double scale = std::max(1.0, w.norm_fro());
    const double stop = 1e-14 * scale;
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_norm(w) <= stop) break;
        const double thresh = (sweep < 3) ? offdiag_norm(w) / (5.0 * n) : 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int qq = p + 1; qq < n; ++qq)
                if (std::abs(w(p, qq)) > thresh) jacobi_rotate(w, q, p, qq);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = w(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return ev[i] > ev[j]; });

    EigResult r;
    r.eigenvalues.resize(n);
    r.eigenvectors = CMatrix(n, n);
    for (int k = 0; k < n; ++k) {
        r.eigenvalues[k] = ev[order[k]];
        for (int i = 0; i < n; ++i) r.eigenvectors(i, k) = q(i, order[k]);
    }
    return r;
}

double psd_min_eig(const CMatrix& a, double tol) {
    EigResult e = herm_eig(a, tol);
    return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
}

CMatrix polar_unitary(const CMatrix& x, KernelPolicy) {
    if (!x.square()) throw DimensionMismatch("polar_unitary needs a square matrix");
    const int n = x.rows();
    if (n == 0) return x;
    CMatrix h2 = x.adjoint() * x;
    EigResult e = herm_eig(h2, 1e-8 * (1.0 + h2.norm_fro()));
    const double lmax = std::max(0.0, e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front());
    const double thresh = std::max(lmax * 1e-13, 1e-300);

    // Support columns: w_i = X q_i / sigma_i, orthonormal basis of range(X).
    std::vector<std::vector<cplx>> support_w;
    std::vector<int> kernel_idx;
    CMatrix u(n, n);
    for (int k = 0; k < n; ++k) {
        if (e.eigenvalues[k] > thresh) {
            const double sigma = std::sqrt(e.eigenvalues[k]);
            std::vector<cplx> qk(n), wk(n);
            for (int i = 0; i < n; ++i) qk[i] = e.eigenvectors(i, k);
            wk = x.apply(qk);
            for (auto& v : wk) v /= sigma;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) u(i, j) += wk[i] * std::conj(qk[j]);
            support_w.push_back(std::move(wk));
        } else {
            kernel_idx.push_back(k);
        }
    }

    // Kernel completion: Gram-Schmidt the standard basis against range(X),
    // mapping kernel eigenvectors to cokernel vectors in index order.
    std::vector<std::vector<cplx>> cokernel;
    for (int c = 0; c < n && int(cokernel.size()) < int(kernel_idx.size()); ++c) {
        std::vector<cplx> v(n, 0.0);
        v[c] = 1.0;
        for (const auto& w : support_w) {
            cplx ip = inner(w, v);
            for (int i = 0; i < n; ++i) v[i] -= ip * w[i];
        }
        for (const auto& w : cokernel) {
            cplx ip = inner(w, v);
            for (int i = 0; i < n; ++i) v[i] -= ip * w[i];
        }
        const double nv = vec_norm(v);
        if (nv > 1e-7) {
            for (auto& z : v) z /= nv;
            cokernel.push_back(std::move(v));
        }
    }
    for (size_t k = 0; k < kernel_idx.size(); ++k) {
        const int col = kernel_idx[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                u(i, j) += cokernel[k][i] * std::conj(e.eigenvectors(j, col));
    }
    return u;
}

CMatrix expm(const CMatrix& a) {
    if (!a.square()) throw DimensionMismatch("expm needs a square matrix");
    const int n = a.rows();
    const double nrm = a.norm_fro();
    int s = 0;
    if (nrm > 0.5) s = int(std::ceil(std::log2(nrm / 0.5)));
    CMatrix b = a * cplx(std::ldexp(1.0, -s));

    CMatrix result = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = term * b;
        term *= cplx(1.0 / k);
        result += term;
        if (term.norm_fro() <= 1e-18 * std::max(1.0, result.norm_fro())) break;
    }
    for (int k = 0; k < s; ++k) result = result * result;
    return result;
}

int gram_rank(const CMatrix& gram, double rel_tol) {
    EigResult e = herm_eig(gram, 1e-7 * (1.0 + gram.norm_fro()));
    if (e.eigenvalues.empty()) return 0;
    const double lmax = std::max(0.0, e.eigenvalues.front());
    int r = 0;
    for (double l : e.eigenvalues)
        if (l > rel_tol * std::max(lmax, 1e-300)) ++r;
    return r;
}

CMatrix pinv_hermitian(const CMatrix& a, double rel_tol) {
    EigResult e = herm_eig(a, 1e-7 * (1.0 + a.norm_fro()));
    const int n = a.rows();
    double lmax = 0.0;
    for (double l : e.eigenvalues) lmax = std::max(lmax, std::abs(l));
    CMatrix out(n, n);
    for (int k = 0; k < n; ++k) {
        const double l = e.eigenvalues[k];
        if (std::abs(l) <= rel_tol * std::max(lmax, 1e-300)) continue;
        const double inv = 1.0 / l;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) += inv * e.eigenvectors(i, k) * std::conj(e.eigenvectors(j, k));
    }
    return out;
}

CMatrix pinv(const CMatrix& a, double rel_tol) {
    return pinv_hermitian(a.adjoint() * a, rel_tol) * a.adjoint();
}

}  // namespace cpdil
