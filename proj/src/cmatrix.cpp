#include "cpdil/cmatrix.hpp"

#include <cmath>

#include "cpdil/numerics.hpp"

namespace cpdil {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::unit(int n, int i, int j) {
    CMatrix m(n, n);
    m(i, j) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const std::vector<cplx>& d) {
    CMatrix m(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMatrix CMatrix::conj() const {
    CMatrix m(rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) m.data_[k] = std::conj(data_[k]);
    return m;
}

CMatrix CMatrix::operator+(const CMatrix& o) const {
    CMatrix m = *this;
    m += o;
    return m;
}

CMatrix CMatrix::operator-(const CMatrix& o) const {
    CMatrix m = *this;
    m -= o;
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix add");
    for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix sub");
    for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CMatrix CMatrix::operator*(const CMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionMismatch("matrix mul");
    CMatrix m(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        const cplx* arow = &data_[size_t(i) * cols_];
        cplx* mrow = &m.data_[size_t(i) * o.cols_];
        for (int k = 0; k < cols_; ++k) {
            const cplx aik = arow[k];
            if (aik == cplx(0.0)) continue;
            const cplx* brow = &o.data_[size_t(k) * o.cols_];
            for (int j = 0; j < o.cols_; ++j) mrow[j] += aik * brow[j];
        }
    }
    return m;
}

CMatrix CMatrix::operator*(cplx s) const {
    CMatrix m = *this;
    m *= s;
    return m;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

cplx CMatrix::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::norm_fro() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double CMatrix::norm_max() const {
    double s = 0.0;
    for (const auto& v : data_) s = std::max(s, std::abs(v));
    return s;
}

double CMatrix::norm_op() const {
    if (rows_ == 0 || cols_ == 0) return 0.0;
    CMatrix g = adjoint() * (*this);
    // g is Hermitian PSD up to roundoff.
    EigResult e = herm_eig(g, 1e-8 * (1.0 + g.norm_fro()));
    double top = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
    return std::sqrt(std::max(0.0, top));
}

std::vector<cplx> CMatrix::apply(const std::vector<cplx>& v) const {
    if (int(v.size()) != cols_) throw DimensionMismatch("matrix apply");
    std::vector<cplx> out(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        cplx s = 0.0;
        const cplx* arow = &data_[size_t(i) * cols_];
        for (int j = 0; j < cols_; ++j) s += arow[j] * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<cplx> CMatrix::vec() const {
    std::vector<cplx> v(size_t(rows_) * cols_);
    for (int j = 0; j < cols_; ++j)
        for (int i = 0; i < rows_; ++i) v[size_t(j) * rows_ + i] = (*this)(i, j);
    return v;
}

CMatrix CMatrix::unvec(const std::vector<cplx>& v, int rows, int cols) {
    if (int(v.size()) != rows * cols) throw DimensionMismatch("unvec");
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = v[size_t(j) * rows + i];
    return m;
}

CMatrix CMatrix::block(int i0, int j0, int h, int w) const {
    CMatrix m(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
}

void CMatrix::set_block(int i0, int j0, const CMatrix& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

double CMatrix::herm_defect() const {
    if (!square()) return 1.0 / 0.0;
    double s = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
    return std::sqrt(s);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return m;
}

double vec_norm(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

CMatrix random_hermitian(int n, std::mt19937_64& rng, double scale) {
    CMatrix a = random_matrix(n, n, rng, scale);
    CMatrix h = (a + a.adjoint()) * cplx(0.5);
    return h;
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
    return polar_unitary(random_matrix(n, n, rng));
}

}  // namespace cpdil
