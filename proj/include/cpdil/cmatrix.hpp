#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "cpdil/errors.hpp"

namespace cpdil {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. The one container every module shares.
class CMatrix {
public:
    CMatrix() : rows_(0), cols_(0) {}
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}

    static CMatrix identity(int n);
    static CMatrix zeros(int rows, int cols) { return CMatrix(rows, cols); }
    /// Matrix unit E_{ij} in M_n.
    static CMatrix unit(int n, int i, int j);
    static CMatrix diag(const std::vector<cplx>& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conj() const;

    CMatrix operator+(const CMatrix& o) const;
    CMatrix operator-(const CMatrix& o) const;
    CMatrix operator*(const CMatrix& o) const;
    CMatrix operator*(cplx s) const;
    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    cplx trace() const;
    double norm_fro() const;
    double norm_max() const;  // max |entry|
    /// Operator (spectral) norm via the largest eigenvalue of A*A.
    double norm_op() const;

    /// Column of a matrix-vector product, o of size cols().
    std::vector<cplx> apply(const std::vector<cplx>& v) const;

    /// Column-major stacking: vec(A)[j*rows + i] = A(i,j).
    std::vector<cplx> vec() const;
    static CMatrix unvec(const std::vector<cplx>& v, int rows, int cols);

    CMatrix block(int i0, int j0, int h, int w) const;
    void set_block(int i0, int j0, const CMatrix& b);

    bool is_hermitian(double tol) const { return herm_defect() <= tol; }
    double herm_defect() const;  // ||A - A*||_F

    friend CMatrix operator*(cplx s, const CMatrix& a) { return a * s; }

private:
    int rows_, cols_;
    std::vector<cplx> data_;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

inline cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    cplx s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double vec_norm(const std::vector<cplx>& x);

/// Random matrices for tests and fixtures; all randomness flows through one engine.
CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0);
CMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0);
CMatrix random_unitary(int n, std::mt19937_64& rng);

}  // namespace cpdil
