#include "cpdil/channel.hpp"

#include <cmath>

#include "cpdil/numerics.hpp"

namespace cpdil {

Channel Channel::from_kraus(const std::vector<CMatrix>& ops) {
    if (ops.empty()) throw DimensionMismatch("from_kraus needs at least one operator");
    const int n = ops[0].rows();
    CMatrix choi(n * n, n * n);
    for (const auto& t : ops) {
        if (t.rows() != n || t.cols() != n) throw DimensionMismatch("Kraus operator size");
        const auto v = t.vec();
        for (size_t a = 0; a < v.size(); ++a)
            for (size_t b = 0; b < v.size(); ++b) choi(int(a), int(b)) += v[a] * std::conj(v[b]);
    }
    return Channel(n, std::move(choi));
}

Channel Channel::from_choi(const CMatrix& choi, double tol) {
    if (!choi.square()) throw DimensionMismatch("Choi matrix must be square");
    const int n2 = choi.rows();
    const int n = int(std::lround(std::sqrt(double(n2))));
    if (n * n != n2) throw DimensionMismatch("Choi size is not a perfect square");
    const double me = psd_min_eig(choi, tol * (1.0 + choi.norm_fro()));
    if (me < -tol * std::max(1.0, choi.norm_fro())) throw NotCP(me);
    return Channel(n, choi);
}

Channel Channel::from_superop(const CMatrix& s, double tol) {
    if (!s.square()) throw DimensionMismatch("superoperator must be square");
    const int n2 = s.rows();
    const int n = int(std::lround(std::sqrt(double(n2))));
    if (n * n != n2) throw DimensionMismatch("superoperator size is not a perfect square");
    // S[k*n+i][q*n+p] = choi[p*n+i][q*n+k].
    CMatrix choi(n2, n2);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    choi(p * n + i, q * n + k) = s(k * n + i, q * n + p);
    return from_choi(choi, tol);
}

Channel Channel::identity(int n) { return from_kraus({CMatrix::identity(n)}); }

CMatrix Channel::apply(const CMatrix& a) const {
    if (a.rows() != n_ || a.cols() != n_) throw DimensionMismatch("channel apply");
    CMatrix out(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            cplx s = 0.0;
            for (int p = 0; p < n_; ++p)
                for (int q = 0; q < n_; ++q) s += choi_(p * n_ + i, q * n_ + k) * a(p, q);
            out(i, k) = s;
        }
    return out;
}

CMatrix Channel::apply_dual(const CMatrix& rho) const {
    if (rho.rows() != n_ || rho.cols() != n_) throw DimensionMismatch("channel dual apply");
    // tr(dual(rho) E_qp) = tr(rho apply(E_qp)) fixes dual(rho)(p, q).
    CMatrix out(n_, n_);
    for (int p = 0; p < n_; ++p)
        for (int q = 0; q < n_; ++q) {
            cplx s = 0.0;
            for (int i = 0; i < n_; ++i)
                for (int k = 0; k < n_; ++k) s += choi_(q * n_ + i, p * n_ + k) * rho(k, i);
            out(p, q) = s;
        }
    return out;
}

CMatrix Channel::superop() const {
    const int n = n_;
    CMatrix s(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    s(k * n + i, q * n + p) = choi_(p * n + i, q * n + k);
    return s;
}

const KrausFamily& Channel::minimal_kraus(double rel_tol) const {
    if (!kraus_) {
        EigResult e = herm_eig(choi_, 1e-8 * (1.0 + choi_.norm_fro()));
        const double lmax = e.eigenvalues.empty() ? 0.0 : std::max(0.0, e.eigenvalues.front());
        KrausFamily fam;
        for (int t = 0; t < int(e.eigenvalues.size()); ++t) {
            const double l = e.eigenvalues[t];
            if (l <= rel_tol * std::max(lmax, 1e-300)) continue;
            if (l < 0.0) throw NotCP(l);
            std::vector<cplx> v(size_t(n_) * n_);
            const double s = std::sqrt(l);
            for (int r = 0; r < n_ * n_; ++r) v[r] = s * e.eigenvectors(r, t);
            fam.ops.push_back(CMatrix::unvec(v, n_, n_));
        }
        kraus_ = std::move(fam);
    }
    return *kraus_;
}

Channel Channel::compose(const Channel& other) const {
    if (n_ != other.n_) throw DimensionMismatch("channel compose");
    return from_superop(superop() * other.superop(), 1e-7);
}

bool Channel::is_cp(double tol) const { return choi_min_eig() >= -tol; }

double Channel::choi_min_eig() const {
    return psd_min_eig(choi_, 1e-8 * (1.0 + choi_.norm_fro()));
}

bool Channel::is_contractive(double tol) const {
    CMatrix ti = apply(CMatrix::identity(n_));
    EigResult e = herm_eig(ti, 1e-8 * (1.0 + ti.norm_fro()));
    return e.eigenvalues.empty() || e.eigenvalues.front() <= 1.0 + tol;
}

bool Channel::is_unital(double tol) const {
    return (apply(CMatrix::identity(n_)) - CMatrix::identity(n_)).norm_fro() <= tol;
}

bool Channel::is_endomorphism(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const CMatrix eij = CMatrix::unit(n_, i, j);
            const CMatrix tij = apply(eij);
            if ((apply(eij.adjoint()) - tij.adjoint()).norm_fro() > tol) return false;
            for (int k = 0; k < n_; ++k)
                for (int l = 0; l < n_; ++l) {
                    const CMatrix ekl = CMatrix::unit(n_, k, l);
                    const CMatrix lhs = apply(eij * ekl);
                    if ((lhs - tij * apply(ekl)).norm_fro() > tol) return false;
                }
        }
    return true;
}

double commutation_defect(const Channel& theta, const Channel& phi) {
    return (theta.compose(phi).choi() - phi.compose(theta).choi()).norm_fro();
}

bool commute_check(const Channel& theta, const Channel& phi, double tol) {
    return commutation_defect(theta, phi) <= tol;
}

double trace_norm(const CMatrix& a) {
    // Singular values via the eigenvalues of A*A.
    CMatrix g = a.adjoint() * a;
    EigResult e = herm_eig(g, 1e-8 * (1.0 + g.norm_fro()));
    double s = 0.0;
    for (double l : e.eigenvalues) s += std::sqrt(std::max(0.0, l));
    return s;
}

}  // namespace cpdil
