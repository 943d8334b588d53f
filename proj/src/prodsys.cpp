#include "cpdil/prodsys.hpp"

#include <cmath>

namespace cpdil {

CMatrix KrausFiber::realize(const std::vector<cplx>& coeffs) const {
    if (int(coeffs.size()) != rank()) throw DimensionMismatch("KrausFiber::realize");
    const int n = ops.empty() ? 0 : ops.front().rows();
    CMatrix out(n, n);
    for (int i = 0; i < rank(); ++i) out += ops[size_t(i)] * coeffs[size_t(i)];
    return out;
}

const GridFiber& GridSystem::fiber(int k, int m) const {
    if (k < 0 || m < 0 || k + m > horizon)
        throw HorizonExceeded("(" + std::to_string(k) + ", " + std::to_string(m) +
                              ") outside horizon " + std::to_string(horizon));
    return fibers_[size_t(k) * (horizon + 1) + m];
}

namespace {

int ipow(int b, int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

CMatrix GridSystem::flip(int k, int m) const {
    const int re = e_step.rank(), rf = f_step.rank();
    if (k == 0) return CMatrix::identity(ipow(rf, m));
    if (m == 0) return CMatrix::identity(ipow(re, k));
    // phi_{1,m} = (I_{F^{m-1}} (x) phi)(phi_{1,m-1} (x) I_F)
    CMatrix phi1m = phi;
    for (int j = 2; j <= m; ++j)
        phi1m = kron(CMatrix::identity(ipow(rf, j - 1)), phi) * kron(phi1m, CMatrix::identity(rf));
    // phi_{k,m} = (phi_{1,m} (x) I_{E^{k-1}})(I_E (x) phi_{k-1,m})
    CMatrix out = phi1m;
    for (int i = 2; i <= k; ++i)
        out = kron(phi1m, CMatrix::identity(ipow(re, i - 1))) * kron(CMatrix::identity(re), out);
    return out;
}

CMatrix GridSystem::multiplication(int k, int m, int k2, int m2) const {
    const int re = e_step.rank(), rf = f_step.rank();
    // Reorder the middle F^m (x) E^{k2} back to E^{k2} (x) F^m; concatenation
    // is then the identity on product indices.
    CMatrix inv_flip = flip(k2, m).adjoint();
    return kron(CMatrix::identity(ipow(re, k)), kron(inv_flip, CMatrix::identity(ipow(rf, m2))));
}

GridSystem build_system_from_steps(const KrausFiber& e_step, const KrausFiber& f_step, int level,
                                   int horizon, const CMatrix& step_flip) {
    GridSystem sys;
    sys.n = e_step.ops.empty() ? 0 : e_step.ops.front().rows();
    sys.level = level;
    sys.horizon = horizon;
    sys.e_step = e_step;
    sys.f_step = f_step;
    sys.phi = step_flip;
    const int re = sys.e_step.rank(), rf = sys.f_step.rank();
    if (sys.phi.rows() != rf * re || sys.phi.cols() != re * rf)
        throw DimensionMismatch("step flip shape");

    const int n = sys.n;
    sys.fibers_.assign(size_t(horizon + 1) * (horizon + 1), GridFiber{});
    for (int k = 0; k <= horizon; ++k)
        for (int m = 0; k + m <= horizon; ++m) {
            GridFiber f;
            f.k = k;
            f.m = m;
            f.dim = ipow(re, k) * ipow(rf, m);
            f.basis_ops.reserve(size_t(f.dim));
            for (int idx = 0; idx < f.dim; ++idx) {
                // Decode: E indices major, then F indices, each major-to-minor.
                int rest = idx;
                std::vector<int> js(static_cast<size_t>(m), 0);
                for (int t = m - 1; t >= 0; --t) {
                    js[size_t(t)] = rest % rf;
                    rest /= rf;
                }
                std::vector<int> is(static_cast<size_t>(k), 0);
                for (int t = k - 1; t >= 0; --t) {
                    is[size_t(t)] = rest % re;
                    rest /= re;
                }
                CMatrix op = CMatrix::identity(n);
                for (int t = 0; t < k; ++t) op = op * sys.e_step.ops[size_t(is[size_t(t)])];
                for (int t = 0; t < m; ++t) op = op * sys.f_step.ops[size_t(js[size_t(t)])];
                f.basis_ops.push_back(op);
            }
            f.ttilde = CMatrix(n, f.dim * n);
            for (int b = 0; b < f.dim; ++b) f.ttilde.set_block(0, b * n, f.basis_ops[size_t(b)]);
            sys.fibers_[size_t(k) * (horizon + 1) + m] = std::move(f);
        }
    return sys;
}

GridSystem build_system(const CpSemigroup& r, const CpSemigroup& s, int level, int horizon,
                        const FlipUnitary& u) {
    if (s.dim() != r.dim()) throw DimensionMismatch("build_system base algebras");
    const Dyadic step(1, level);
    KrausFiber e_step{step, r.at(step).minimal_kraus().ops};
    KrausFiber f_step{step, s.at(step).minimal_kraus().ops};
    const int re = e_step.rank(), rf = f_step.rank();
    if (u.m_theta != re || u.m_phi != rf) throw DimensionMismatch("flip certificate rank");

    // phi: e_i (x) f_j -> sum u[(i,j)][(k,l)] f_l (x) e_k.
    CMatrix phi(rf * re, re * rf);
    for (int i = 0; i < re; ++i)
        for (int j = 0; j < rf; ++j)
            for (int k = 0; k < re; ++k)
                for (int l = 0; l < rf; ++l) phi(l * re + k, i * rf + j) = u.u(i * rf + j, k * rf + l);
    return build_system_from_steps(e_step, f_step, level, horizon, phi);
}

ProdsysReport verify_rep_identity(const GridSystem& sys, const CpSemigroup& r,
                                  const CpSemigroup& s, const std::vector<CMatrix>& probes,
                                  double tol) {
    ProdsysReport rep;
    for (int k = 0; k <= sys.horizon; ++k)
        for (int m = 0; k + m <= sys.horizon; ++m) {
            const GridFiber& f = sys.fiber(k, m);
            const Channel& rk = r.at(Dyadic(k, sys.level));
            const Channel& sm = s.at(Dyadic(m, sys.level));
            for (const CMatrix& a : probes) {
                CMatrix lhs(sys.n, sys.n);
                for (const CMatrix& op : f.basis_ops) lhs += op * a * op.adjoint();
                CMatrix rhs = rk.apply(sm.apply(a));
                rep.max_defect = std::max(rep.max_defect, (lhs - rhs).norm_fro());
            }
        }
    // Representation property across the multiplication maps: T(x.y) = T(x)T(y),
    // i.e. Ttilde_{K,M} (U (x) I_H) = Ttilde_1 (I (x) Ttilde_2). Sensitive to the
    // flip certificate whenever the flip is nontrivial.
    const int n = sys.n;
    for (int k1 = 0; k1 <= sys.horizon; ++k1)
        for (int m1 = 0; k1 + m1 <= sys.horizon; ++m1)
            for (int k2 = 0; k1 + m1 + k2 <= sys.horizon; ++k2)
                for (int m2 = 0; k1 + m1 + k2 + m2 <= sys.horizon; ++m2) {
                    const GridFiber& f1 = sys.fiber(k1, m1);
                    const GridFiber& f2 = sys.fiber(k2, m2);
                    const GridFiber& fc = sys.fiber(k1 + k2, m1 + m2);
                    CMatrix lhs = fc.ttilde *
                                  kron(sys.multiplication(k1, m1, k2, m2), CMatrix::identity(n));
                    CMatrix rhs = f1.ttilde * kron(CMatrix::identity(f1.dim), f2.ttilde);
                    rep.max_defect = std::max(rep.max_defect, (lhs - rhs).norm_fro());
                }
    rep.pass = rep.max_defect <= tol;
    return rep;
}

ProdsysReport verify_commutation_relation(const GridSystem& sys, double tol) {
    ProdsysReport rep;
    const int n = sys.n;
    for (int k = 1; k <= sys.horizon; ++k)
        for (int m = 1; k + m <= sys.horizon; ++m) {
            const CMatrix& te = sys.fiber(k, 0).ttilde;
            const CMatrix& tf = sys.fiber(0, m).ttilde;
            const int de = sys.fiber(k, 0).dim, df = sys.fiber(0, m).dim;
            CMatrix lhs = te * kron(CMatrix::identity(de), tf);
            CMatrix rhs = tf * kron(CMatrix::identity(df), te) * kron(sys.flip(k, m), CMatrix::identity(n));
            rep.max_defect = std::max(rep.max_defect, (lhs - rhs).norm_fro());
        }
    rep.pass = rep.max_defect <= tol;
    return rep;
}

ProdsysReport verify_associativity(const GridSystem& sys, double tol) {
    ProdsysReport rep;
    const int h = sys.horizon;
    for (int k1 = 0; k1 <= h; ++k1)
        for (int m1 = 0; k1 + m1 <= h; ++m1)
            for (int k2 = 0; k1 + m1 + k2 <= h; ++k2)
                for (int m2 = 0; k1 + m1 + k2 + m2 <= h; ++m2)
                    for (int k3 = 0; k1 + m1 + k2 + m2 + k3 <= h; ++k3)
                        for (int m3 = 0; k1 + m1 + k2 + m2 + k3 + m3 <= h; ++m3) {
                            const int d1 = sys.fiber(k1, m1).dim;
                            const int d3 = sys.fiber(k3, m3).dim;
                            CMatrix left = sys.multiplication(k1 + k2, m1 + m2, k3, m3) *
                                           kron(sys.multiplication(k1, m1, k2, m2),
                                                CMatrix::identity(d3));
                            CMatrix right = sys.multiplication(k1, m1, k2 + k3, m2 + m3) *
                                            kron(CMatrix::identity(d1),
                                                 sys.multiplication(k2, m2, k3, m3));
                            rep.max_defect = std::max(rep.max_defect, (left - right).norm_fro());
                        }
    rep.pass = rep.max_defect <= tol;
    return rep;
}

}  // namespace cpdil
