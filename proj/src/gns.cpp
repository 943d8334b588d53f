#include "cpdil/gns.hpp"

#include <cmath>

#include "cpdil/numerics.hpp"

namespace cpdil {

namespace {

constexpr int kFlipRankCap = 20;

struct UnitIdx {
    int i, j;
};
inline UnitIdx unit_of(int a, int n) { return {a / n, a % n}; }

// coords = Lambda^{1/2} Q_r*, coords_pinv = Q_r Lambda^{-1/2}.
void quotient_coords(const CMatrix& gram, double rel_tol, CMatrix& coords, CMatrix& coords_pinv,
                     int& rank) {
    EigResult e = herm_eig(gram, 1e-7 * (1.0 + gram.norm_fro()));
    const int n = gram.rows();
    const double lmax = e.eigenvalues.empty() ? 0.0 : std::max(0.0, e.eigenvalues.front());
    int r = 0;
    while (r < n && e.eigenvalues[r] > rel_tol * std::max(lmax, 1e-300)) ++r;
    rank = r;
    coords = CMatrix(r, n);
    coords_pinv = CMatrix(n, r);
    for (int k = 0; k < r; ++k) {
        const double s = std::sqrt(e.eigenvalues[k]);
        for (int c = 0; c < n; ++c) {
            coords(k, c) = s * std::conj(e.eigenvectors(c, k));
            coords_pinv(c, k) = e.eigenvectors(c, k) / s;
        }
    }
}

std::vector<cplx> apply_coords(const CMatrix& m, const std::vector<cplx>& x) { return m.apply(x); }

}  // namespace

GnsModule gns_module(const Channel& theta, double rel_tol) {
    const int n = theta.dim();
    if (n > 3) throw DimTooLarge(n, 3);
    if (!theta.is_cp(1e-9)) throw NotCP(theta.choi_min_eig());

    GnsModule e{n, theta, CMatrix(), CMatrix(), CMatrix(), 0, {}};
    const int nu = n * n;
    const int big = nu * nu;

    // Images of matrix units under Theta.
    std::vector<CMatrix> tu(nu);
    for (int a = 0; a < nu; ++a) tu[a] = theta.apply(CMatrix::unit(n, a / n, a % n));

    // gram[(a,b)][(c,d)] = tau(E_b* Theta(E_a* E_c) E_d)
    //                    = [i_a == i_c] Theta(E_{j_a j_c})(i_b, i_d) [j_b == j_d] / n.
    e.gram = CMatrix(big, big);
    for (int a = 0; a < nu; ++a) {
        const auto ua = unit_of(a, n);
        for (int c = 0; c < nu; ++c) {
            const auto uc = unit_of(c, n);
            if (ua.i != uc.i) continue;
            const CMatrix& x = tu[ua.j * n + uc.j];
            for (int b = 0; b < nu; ++b) {
                const auto ub = unit_of(b, n);
                for (int d = 0; d < nu; ++d) {
                    const auto ud = unit_of(d, n);
                    if (ub.j != ud.j) continue;
                    e.gram(a * nu + b, c * nu + d) = x(ub.i, ud.i) / double(n);
                }
            }
        }
    }
    quotient_coords(e.gram, rel_tol, e.coords, e.coords_pinv, e.rank);

    e.xi.assign(big, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) e.xi[size_t(i * n + i) * nu + (k * n + k)] = 1.0;

    // Cyclic identity <xi, a xi> = Theta(a) on matrix units.
    double worst = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            std::vector<cplx> axi(big, 0.0);
            // E_pq (E_ii (x) E_kk) = [q == i] E_pi (x) E_kk.
            for (int k = 0; k < n; ++k) axi[size_t(p * n + q) * nu + (k * n + k)] = 1.0;
            CMatrix got = gns_mvalued_inner(e, e.xi, axi);
            worst = std::max(worst, (got - tu[p * n + q]).norm_fro());
        }
    if (worst > 1e-9) throw Error("GNS cyclic identity failed: residual " + std::to_string(worst));
    return e;
}

CMatrix gns_mvalued_inner(const GnsModule& e, const std::vector<cplx>& x,
                          const std::vector<cplx>& y) {
    const int n = e.n, nu = n * n;
    std::vector<CMatrix> tu(nu);
    for (int a = 0; a < nu; ++a) tu[a] = e.theta.apply(CMatrix::unit(n, a / n, a % n));
    CMatrix out(n, n);
    for (int a = 0; a < nu; ++a)
        for (int b = 0; b < nu; ++b) {
            const cplx xc = std::conj(x[size_t(a) * nu + b]);
            if (xc == cplx(0.0)) continue;
            const auto ua = unit_of(a, n), ub = unit_of(b, n);
            for (int c = 0; c < nu; ++c) {
                const auto uc = unit_of(c, n);
                if (uc.i != ua.i) continue;
                const CMatrix& t = tu[ua.j * n + uc.j];
                for (int d = 0; d < nu; ++d) {
                    const cplx yc = y[size_t(c) * nu + d];
                    if (yc == cplx(0.0)) continue;
                    const auto ud = unit_of(d, n);
                    out(ub.j, ud.j) += xc * yc * t(ub.i, ud.i);
                }
            }
        }
    return out;
}

GnsTensor module_tensor(const GnsModule& e, const GnsModule& f, double rel_tol) {
    const int n = e.n;
    if (f.n != n) throw DimensionMismatch("module_tensor base algebras");
    GnsTensor t{n, e.theta, f.theta, CMatrix(), CMatrix(), CMatrix(), 0, {}};
    const int nu = n * n;
    const int big = nu * nu * nu;

    std::vector<CMatrix> tu(nu), pu(nu);
    for (int a = 0; a < nu; ++a) {
        tu[a] = e.theta.apply(CMatrix::unit(n, a / n, a % n));
        pu[a] = f.theta.apply(CMatrix::unit(n, a / n, a % n));
    }

    // gram[(a,b,c)][(a',b',c')] = [i_a == i_a'] Theta(E_{j_a j_a'})(i_b, i_b')
    //                            * Phi(E_{j_b j_b'})(i_c, i_c') [j_c == j_c'] / n.
    t.gram = CMatrix(big, big);
    for (int a = 0; a < nu; ++a) {
        const auto ua = unit_of(a, n);
        for (int a2 = 0; a2 < nu; ++a2) {
            const auto ua2 = unit_of(a2, n);
            if (ua.i != ua2.i) continue;
            const CMatrix& x = tu[ua.j * n + ua2.j];
            for (int b = 0; b < nu; ++b) {
                const auto ub = unit_of(b, n);
                for (int b2 = 0; b2 < nu; ++b2) {
                    const auto ub2 = unit_of(b2, n);
                    const cplx mid = x(ub.i, ub2.i);
                    if (mid == cplx(0.0)) continue;
                    const CMatrix& y = pu[ub.j * n + ub2.j];
                    for (int c = 0; c < nu; ++c) {
                        const auto uc = unit_of(c, n);
                        for (int c2 = 0; c2 < nu; ++c2) {
                            const auto uc2 = unit_of(c2, n);
                            if (uc.j != uc2.j) continue;
                            t.gram((a * nu + b) * nu + c, (a2 * nu + b2) * nu + c2) =
                                mid * y(uc.i, uc2.i) / double(n);
                        }
                    }
                }
            }
        }
    }
    quotient_coords(t.gram, rel_tol, t.coords, t.coords_pinv, t.rank);

    t.xi_eta.assign(big, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                t.xi_eta[size_t((i * n + i) * nu + (k * n + k)) * nu + (l * n + l)] = 1.0;
    return t;
}

CMatrix tensor_mvalued_inner(const GnsTensor& t, const std::vector<cplx>& x,
                             const std::vector<cplx>& y) {
    const int n = t.n, nu = n * n;
    std::vector<CMatrix> tu(nu), pu(nu);
    for (int a = 0; a < nu; ++a) {
        tu[a] = t.theta.apply(CMatrix::unit(n, a / n, a % n));
        pu[a] = t.phi.apply(CMatrix::unit(n, a / n, a % n));
    }
    CMatrix out(n, n);
    const int big = nu * nu * nu;
    for (int idx = 0; idx < big; ++idx) {
        const cplx xc = std::conj(x[size_t(idx)]);
        if (xc == cplx(0.0)) continue;
        const int a = idx / (nu * nu), b = (idx / nu) % nu, c = idx % nu;
        const auto ua = unit_of(a, n), ub = unit_of(b, n), uc = unit_of(c, n);
        for (int idy = 0; idy < big; ++idy) {
            const cplx yc = y[size_t(idy)];
            if (yc == cplx(0.0)) continue;
            const int a2 = idy / (nu * nu), b2 = (idy / nu) % nu, c2 = idy % nu;
            const auto ua2 = unit_of(a2, n), ub2 = unit_of(b2, n), uc2 = unit_of(c2, n);
            if (ua.i != ua2.i) continue;
            const cplx mid = tu[ua.j * n + ua2.j](ub.i, ub2.i);
            if (mid == cplx(0.0)) continue;
            out(uc.j, uc2.j) += xc * yc * mid * pu[ub.j * n + ub2.j](uc.i, uc2.i);
        }
    }
    return out;
}

namespace {

// Spanning-level action matrices (left multiplication on the a-leg, right on the c-leg).
CMatrix span_left_action(int n, int i, int j) {
    const int nu = n * n, big = nu * nu * nu;
    CMatrix m(big, big);
    for (int a = 0; a < nu; ++a) {
        const auto ua = unit_of(a, n);
        if (ua.i != j) continue;  // E_ij E_{i_a j_a} = [j == i_a] E_{i j_a}
        const int a2 = i * n + ua.j;
        for (int rest = 0; rest < nu * nu; ++rest) m(a2 * nu * nu + rest, a * nu * nu + rest) = 1.0;
    }
    return m;
}

CMatrix span_right_action(int n, int i, int j) {
    const int nu = n * n, big = nu * nu * nu;
    CMatrix m(big, big);
    for (int c = 0; c < nu; ++c) {
        const auto uc = unit_of(c, n);
        if (uc.j != i) continue;  // E_{i_c j_c} E_ij = [j_c == i] E_{i_c j}
        const int c2 = uc.i * n + j;
        for (int rest = 0; rest < nu * nu; ++rest) m(rest * nu + c2, rest * nu + c) = 1.0;
    }
    return m;
}

}  // namespace

CMatrix tensor_left_action(const GnsTensor& t, int i, int j) {
    return t.coords * span_left_action(t.n, i, j) * t.coords_pinv;
}

CMatrix tensor_right_action(const GnsTensor& t, int i, int j) {
    return t.coords * span_right_action(t.n, i, j) * t.coords_pinv;
}

FlipWitnessResult flip_witness(const Channel& theta, const Channel& phi, double tol) {
    const double cdef = commutation_defect(theta, phi);
    if (cdef > tol) throw NotCommuting(cdef);

    GnsModule e = gns_module(theta);
    GnsModule f = gns_module(phi);
    GnsTensor ef = module_tensor(e, f);
    GnsTensor fe = module_tensor(f, e);
    if (ef.rank != fe.rank) throw Infeasible(double(std::abs(ef.rank - fe.rank)));
    const int r = ef.rank;
    if (r > kFlipRankCap) throw DimTooLarge(r, kFlipRankCap);
    const int n = theta.dim();

    // Normal matrix of the homogeneous intertwining constraints
    // W L = L' W, W R = R' W over all matrix units, plus the affine
    // cyclic-exchange row W z = z'.
    const CMatrix id_r = CMatrix::identity(r);
    CMatrix normal(r * r, r * r);
    std::vector<std::pair<CMatrix, CMatrix>> pairs;  // (action on EF, action on FE)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            pairs.emplace_back(tensor_left_action(ef, i, j), tensor_left_action(fe, i, j));
            pairs.emplace_back(tensor_right_action(ef, i, j), tensor_right_action(fe, i, j));
        }
    for (const auto& [l, lp] : pairs) {
        const CMatrix lt = l.transpose();
        normal += kron(lt.adjoint() * lt, id_r);
        normal += kron(id_r, lp.adjoint() * lp);
        normal -= kron(l.conj(), lp);
        normal -= kron(lt, lp.adjoint());
    }

    const auto z = apply_coords(ef.coords, ef.xi_eta);
    const auto zp = apply_coords(fe.coords, fe.xi_eta);
    CMatrix zz(r, r), rhs_mat(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            zz(i, j) = std::conj(z[i]) * z[j];
            rhs_mat(i, j) = zp[i] * std::conj(z[j]);
        }
    normal += kron(zz, id_r);
    const std::vector<cplx> rhs = rhs_mat.vec();

    const CMatrix npinv = pinv_hermitian(normal, 1e-12);
    auto affine_project = [&](const CMatrix& w) {
        std::vector<cplx> v = w.vec();
        std::vector<cplx> resid = normal.apply(v);
        for (size_t k = 0; k < resid.size(); ++k) resid[k] -= rhs[k];
        std::vector<cplx> corr = npinv.apply(resid);
        for (size_t k = 0; k < v.size(); ++k) v[k] -= corr[k];
        return CMatrix::unvec(v, r, r);
    };

    CMatrix w = CMatrix::unvec(npinv.apply(rhs), r, r);
    for (int iter = 0; iter < 60; ++iter) {
        CMatrix next = affine_project(polar_unitary(w));
        const double step = (next - w).norm_fro();
        w = next;
        if (step <= 1e-14) break;
    }

    FlipWitnessResult res;
    res.w = w;
    double cres = 0.0;
    for (const auto& [l, lp] : pairs) cres = std::max(cres, (w * l - lp * w).norm_fro());
    {
        std::vector<cplx> wz = w.apply(z);
        double d2 = 0.0;
        for (int i = 0; i < r; ++i) d2 += std::norm(wz[i] - zp[i]);
        cres = std::max(cres, std::sqrt(d2));
    }
    res.constraint_residual = cres;
    res.unitarity_defect = (w.adjoint() * w - id_r).norm_fro();
    if (res.constraint_residual > tol || res.unitarity_defect > tol)
        throw Infeasible(std::max(res.constraint_residual, res.unitarity_defect));
    return res;
}

CMatrix flip_from_kraus(const Channel& theta, const Channel& phi, const FlipUnitary& wu,
                        const GnsTensor& ef, const GnsTensor& fe) {
    const int n = theta.dim();
    const int nu = n * n, big = nu * nu * nu;
    const auto& tf = theta.minimal_kraus().ops;
    const auto& sf = phi.minimal_kraus().ops;
    const int mt = int(tf.size()), mp = int(sf.size());
    const int slots = mt * mp * nu;

    // J(a (x) b (x) c)_{(i,j)} = E_a T_i E_b S_j E_c
    //                          = T_i(j_a, i_b) S_j(j_b, i_c) E_{i_a j_c}.
    CMatrix k_ef(slots, big), k_fe(slots, big);
    for (int idx = 0; idx < big; ++idx) {
        const int a = idx / (nu * nu), b = (idx / nu) % nu, c = idx % nu;
        const auto ua = unit_of(a, n), ub = unit_of(b, n), uc = unit_of(c, n);
        const int ent = ua.i * n + uc.j;  // entry (i_a, j_c), row-major flatten
        for (int i = 0; i < mt; ++i)
            for (int j = 0; j < mp; ++j) {
                k_ef((i * mp + j) * nu + ent, idx) = tf[i](ua.j, ub.i) * sf[j](ub.j, uc.i);
                k_fe((i * mp + j) * nu + ent, idx) = sf[j](ua.j, ub.i) * tf[i](ub.j, uc.i);
            }
    }
    // Kraus-level flip in J coordinates: slots (i,j) -> (k,l) through conj(u)^T = u*.
    CMatrix cmap = kron(wu.u.adjoint(), CMatrix::identity(nu));
    // Note: k_fe rows are indexed (k, l) with k major, matching u*'s rows.
    return fe.coords * pinv(k_fe) * cmap * k_ef * ef.coords_pinv;
}

}  // namespace cpdil
