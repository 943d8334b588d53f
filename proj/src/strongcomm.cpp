#include "cpdil/strongcomm.hpp"

#include <cmath>
#include <random>

#include "cpdil/numerics.hpp"

namespace cpdil {

namespace {

// Columns vec(fam1[i] * fam2[j]) in (i, j) lexicographic order, i major.
CMatrix product_columns(const std::vector<CMatrix>& fam1, const std::vector<CMatrix>& fam2) {
    const int n = fam1[0].rows();
    const int cols = int(fam1.size() * fam2.size());
    CMatrix a(n * n, cols);
    int c = 0;
    for (const auto& t : fam1)
        for (const auto& s : fam2) {
            const auto v = (t * s).vec();
            for (int r = 0; r < n * n; ++r) a(r, c) = v[size_t(r)];
            ++c;
        }
    return a;
}

// Orthonormal kernel basis columns of a coisometry-style row map v (r x m with
// v v* = I_r): eigenvectors of I - v*v at eigenvalue one, in solver order.
std::vector<std::vector<cplx>> kernel_basis(const CMatrix& v, int expect) {
    const int m = v.cols();
    CMatrix p = CMatrix::identity(m) - v.adjoint() * v;
    EigResult e = herm_eig(p, 1e-8 * (1.0 + p.norm_fro()));
    std::vector<std::vector<cplx>> out;
    for (int k = 0; k < expect; ++k) {
        std::vector<cplx> x(m);
        for (int i = 0; i < m; ++i) x[i] = e.eigenvectors(i, k);
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

FlipUnitary witness_unitary(const Channel& theta, const Channel& phi, double tol) {
    if (theta.dim() != phi.dim()) throw DimensionMismatch("witness_unitary dims");
    const auto& tf = theta.minimal_kraus().ops;
    const auto& sf = phi.minimal_kraus().ops;
    const int mt = int(tf.size()), mp = int(sf.size());
    const int mn = mt * mp;

    CMatrix a = product_columns(tf, sf);  // columns vec(T_i S_j), (i, j)
    // Columns vec(S_l T_k) arranged so column (k, l) [k major] matches u's columns.
    const int n2 = a.rows();
    CMatrix b(n2, mn);
    for (int k = 0; k < mt; ++k)
        for (int l = 0; l < mp; ++l) {
            const auto v = (sf[l] * tf[k]).vec();
            for (int r = 0; r < n2; ++r) b(r, k * mp + l) = v[size_t(r)];
        }

    const CMatrix aa = a * a.adjoint();
    const double defect = (aa - b * b.adjoint()).norm_fro();
    if (defect > tol) throw NotCommuting(defect);

    // Shared column space: aa = bb* up to tol. Write a = r va, b = r vb with
    // r = aa^{1/2}; then m0 = vb* va satisfies b m0 = a on the support.
    EigResult e = herm_eig(aa, 1e-8 * (1.0 + aa.norm_fro()));
    const double lmax = e.eigenvalues.empty() ? 0.0 : std::max(0.0, e.eigenvalues.front());
    const double thresh = std::max(lmax * 1e-12, 1e-300);
    int r = 0;
    while (r < int(e.eigenvalues.size()) && e.eigenvalues[r] > thresh) ++r;

    CMatrix qs(n2, r);
    for (int c = 0; c < r; ++c) {
        const double inv = 1.0 / std::sqrt(e.eigenvalues[c]);
        for (int i = 0; i < n2; ++i) qs(i, c) = e.eigenvectors(i, c) * inv;
    }
    CMatrix va = qs.adjoint() * a;  // r x mn, coisometry rows
    CMatrix vb = qs.adjoint() * b;
    CMatrix m = vb.adjoint() * va;

    // Complete the partial isometry: map ker(a) onto ker(b) in eigen order.
    if (r < mn) {
        auto ka = kernel_basis(va, mn - r);
        auto kb = kernel_basis(vb, mn - r);
        for (int t = 0; t < mn - r; ++t)
            for (int i = 0; i < mn; ++i)
                for (int j = 0; j < mn; ++j) m(i, j) += kb[t][i] * std::conj(ka[t][j]);
    }

    FlipUnitary w;
    w.m_theta = mt;
    w.m_phi = mp;
    w.u = m.transpose();  // u[(i,j)][(k,l)] with a = b m, m[(k,l)][(i,j)]
    CMatrix resid = a - b * m;
    double col_res = 0.0;
    for (int c = 0; c < mn; ++c) {
        double s = 0.0;
        for (int i = 0; i < n2; ++i) s += std::norm(resid(i, c));
        col_res = std::max(col_res, std::sqrt(s));
    }
    w.residual = col_res;
    w.unitarity_defect = (w.u.adjoint() * w.u - CMatrix::identity(mn)).norm_fro();
    if (w.residual > tol || w.unitarity_defect > tol) throw WitnessResidual(w.residual);
    return w;
}

SpaceDims space_dims(const Channel& theta, const Channel& phi) {
    const int n = theta.dim();
    if (n != phi.dim()) throw DimensionMismatch("space_dims dims");
    if (n > 3) throw DimTooLarge(n, 3);

    // Gram of the span {E_a (x) E_b (x) e_h} under
    // <a (x) b (x) h, c (x) d (x) k> = <h, outer(b* inner(a* c) d) k>.
    auto gram_rank_for = [&](const Channel& inner_map, const Channel& outer_map) {
        const int nu = n * n;  // matrix units per leg
        const int big = nu * nu * n;
        std::vector<CMatrix> units;
        units.reserve(nu);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) units.push_back(CMatrix::unit(n, i, j));

        CMatrix gram(big, big);
        for (int ua = 0; ua < nu; ++ua)
            for (int uc = 0; uc < nu; ++uc) {
                const CMatrix x = inner_map.apply(units[ua].adjoint() * units[uc]);
                for (int ub = 0; ub < nu; ++ub)
                    for (int ud = 0; ud < nu; ++ud) {
                        const CMatrix y = outer_map.apply(units[ub].adjoint() * x * units[ud]);
                        for (int h = 0; h < n; ++h)
                            for (int k = 0; k < n; ++k)
                                gram((ua * nu + ub) * n + h, (uc * nu + ud) * n + k) = y(h, k);
                    }
            }
        return gram_rank(gram);
    };

    SpaceDims d;
    d.d1 = gram_rank_for(phi, theta);  // M (x)_Phi M (x)_Theta H
    d.d2 = gram_rank_for(theta, phi);
    d.commutation_defect = commutation_defect(theta, phi);
    return d;
}

CMatrix kraus_product_coeffs(const Channel& step_ab, const std::vector<CMatrix>& fam_a,
                             const std::vector<CMatrix>& fam_b) {
    const auto& coarse = step_ab.minimal_kraus().ops;
    const int ra = int(fam_a.size()), rb = int(fam_b.size()), rc = int(coarse.size());
    CMatrix c(rc, ra * rb);
    for (int al = 0; al < rc; ++al) {
        const auto va = coarse[al].vec();
        const double l = vec_norm(va) * vec_norm(va);
        for (int i = 0; i < ra; ++i)
            for (int p = 0; p < rb; ++p)
                c(al, i * rb + p) = inner(va, (fam_a[i] * fam_b[p]).vec()) / l;
    }
    return c;
}

namespace {

// Flip matrix of the witness: phi[(l,k)][(i,j)] = u[(i,j)][(k,l)], mapping
// E (x) F coordinates (i major) to F (x) E coordinates (l major).
CMatrix flip_matrix(const FlipUnitary& w) {
    const int mt = w.m_theta, mp = w.m_phi;
    CMatrix phi(mp * mt, mt * mp);
    for (int i = 0; i < mt; ++i)
        for (int j = 0; j < mp; ++j)
            for (int k = 0; k < mt; ++k)
                for (int l = 0; l < mp; ++l) phi(l * mt + k, i * mp + j) = w.u(i * mp + j, k * mp + l);
    return phi;
}

}  // namespace

CoherenceReport sc_semigroup_check(const CpSemigroup& r, const CpSemigroup& s, int level,
                                   int horizon, double tol) {
    if (r.dim() != s.dim()) throw DimensionMismatch("sc_semigroup_check dims");
    CoherenceReport rep;

    auto rstep = [&](int a) -> const Channel& { return r.at(Dyadic(a, level)); };
    auto sstep = [&](int b) -> const Channel& { return s.at(Dyadic(b, level)); };

    // Witness cache per (a, b) grid pair (a steps of R against b steps of S).
    std::map<std::pair<int, int>, FlipUnitary> wit;
    auto witness = [&](int a, int b) -> const FlipUnitary& {
        auto key = std::make_pair(a, b);
        auto it = wit.find(key);
        if (it == wit.end()) {
            FlipUnitary w = witness_unitary(rstep(a), sstep(b), tol);
            rep.max_witness_residual = std::max(rep.max_witness_residual, w.residual);
            it = wit.emplace(key, std::move(w)).first;
        }
        return it->second;
    };

    double max_defect = 0.0;

    // First variable: combining R-steps a + a' against an S-step b.
    for (int a = 1; a < horizon; ++a)
        for (int a2 = 1; a + a2 <= horizon; ++a2)
            for (int b = 1; b <= horizon; ++b) {
                const auto& fa = rstep(a).minimal_kraus().ops;
                const auto& fa2 = rstep(a2).minimal_kraus().ops;
                const auto& fb = sstep(b).minimal_kraus().ops;
                const int ra = int(fa.size()), ra2 = int(fa2.size()), rb = int(fb.size());
                CMatrix ce = kraus_product_coeffs(rstep(a + a2), fa, fa2);
                CMatrix f1 = flip_matrix(witness(a, b));
                CMatrix f2 = flip_matrix(witness(a2, b));
                CMatrix fc = flip_matrix(witness(a + a2, b));
                CMatrix route1 = fc * kron(ce, CMatrix::identity(rb));
                CMatrix route2 = kron(CMatrix::identity(rb), ce) *
                                 kron(f1, CMatrix::identity(ra2)) *
                                 kron(CMatrix::identity(ra), f2);
                max_defect = std::max(max_defect, (route1 - route2).norm_fro());
            }

    // Second variable: an R-step a against combined S-steps b + b'.
    for (int b = 1; b < horizon; ++b)
        for (int b2 = 1; b + b2 <= horizon; ++b2)
            for (int a = 1; a <= horizon; ++a) {
                const auto& fa = rstep(a).minimal_kraus().ops;
                const auto& fb = sstep(b).minimal_kraus().ops;
                const auto& fb2 = sstep(b2).minimal_kraus().ops;
                const int ra = int(fa.size()), rb = int(fb.size()), rb2 = int(fb2.size());
                CMatrix cf = kraus_product_coeffs(sstep(b + b2), fb, fb2);
                CMatrix f1 = flip_matrix(witness(a, b));
                CMatrix f2 = flip_matrix(witness(a, b2));
                CMatrix fc = flip_matrix(witness(a, b + b2));
                CMatrix route1 = fc * kron(CMatrix::identity(ra), cf);
                CMatrix route2 = kron(cf, CMatrix::identity(ra)) *
                                 kron(CMatrix::identity(rb), f2) *
                                 kron(f1, CMatrix::identity(rb2));
                max_defect = std::max(max_defect, (route1 - route2).norm_fro());
            }

    rep.max_defect = max_defect;
    rep.pass = max_defect <= tol;
    if (!rep.pass) throw CoherenceDefect("dyadic grid flip diagrams", max_defect);
    return rep;
}

std::pair<CpSemigroup, CpSemigroup> make_endo_pair(int n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMatrix q = random_unitary(n, rng);
    CMatrix d1(n, n), d2(n, n);
    for (int i = 0; i < n; ++i) {
        d1(i, i) = g(rng);
        d2(i, i) = g(rng);
    }
    Generator g1, g2;
    g1.dim = g2.dim = n;
    g1.G = (q * d1 * q.adjoint()) * cplx(0.0, 1.0);
    g2.G = (q * d2 * q.adjoint()) * cplx(0.0, 1.0);
    return {CpSemigroup(g1), CpSemigroup(g2)};
}

std::pair<CpSemigroup, CpSemigroup> make_aut_cp_pair(int n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMatrix q = random_unitary(n, rng);
    CMatrix h(n, n), lam(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = g(rng);
        lam(i, i) = cplx(0.5 * g(rng), 0.5 * g(rng));
    }
    Generator aut;
    aut.dim = n;
    aut.G = (q * h * q.adjoint()) * cplx(0.0, 1.0);

    Generator cp;
    cp.dim = n;
    cp.jumps = {q * lam * q.adjoint()};
    const double kappa = 0.3;  // strictly contractive: dissipation = -kappa I
    cp.G = (cp.jumps[0].adjoint() * cp.jumps[0]) * cplx(-0.5) -
           CMatrix::identity(n) * cplx(kappa / 2.0);
    return {CpSemigroup(aut), CpSemigroup(cp)};
}

std::pair<CpSemigroup, CpSemigroup> make_conjugation_pair(const CMatrix& a, const CMatrix& b,
                                                          double tol) {
    if (!a.square() || !b.square() || a.rows() != b.rows())
        throw DimensionMismatch("conjugation seeds");
    const double defect = (a * b - b * a).norm_fro();
    if (defect > tol * (1.0 + a.norm_fro() * b.norm_fro())) throw SeedsNotCommuting(defect);
    // phi_t(x) = e^{tA} x e^{tA*} has generator L(x) = A x + x A*, i.e. G = A*.
    Generator ga, gb;
    ga.dim = gb.dim = a.rows();
    ga.G = a.adjoint();
    gb.G = b.adjoint();
    if (ga.dissipation_excess() > 1e-9 || gb.dissipation_excess() > 1e-9)
        throw Error("conjugation seeds must be dissipative (A + A* <= 0)");
    return {CpSemigroup(ga), CpSemigroup(gb)};
}

}  // namespace cpdil
