#include "cpdil/dilate.hpp"

#include <algorithm>
#include <cmath>

#include "cpdil/numerics.hpp"

namespace cpdil {

namespace {

std::pair<int, int> pos_part(std::pair<int, int> d) {
    return {std::max(d.first, 0), std::max(d.second, 0)};
}
std::pair<int, int> neg_part(std::pair<int, int> d) {
    return {std::max(-d.first, 0), std::max(-d.second, 0)};
}
int abs1(std::pair<int, int> p) { return p.first + p.second; }

// Positive-quadrant grid points with |p|_1 <= radius, origin first.
std::vector<std::pair<int, int>> quadrant_points(int radius) {
    std::vector<std::pair<int, int>> pts;
    for (int total = 0; total <= radius; ++total)
        for (int k = 0; k <= total; ++k) pts.emplace_back(k, total - k);
    return pts;
}

struct GramForm {
    std::vector<std::pair<int, int>> points;
    std::vector<int> offsets;
    int dim = 0;
    CMatrix gram;
};

// Gram of the kernel over H_0: block (n, m) carries the translated kernel value
// (U_{c,d-} (x) I)(I_{X(c)} (x) Phi(d))(U_{c,d+} (x) I)* with c = min(n, m).
GramForm assemble_gram(const ToeplitzKernel& kernel) {
    GramForm g;
    const GridSystem& sys = kernel.system;
    const int nh = sys.n;
    g.points = quadrant_points(kernel.radius);
    g.offsets.reserve(g.points.size());
    for (const auto& p : g.points) {
        g.offsets.push_back(g.dim);
        g.dim += sys.fiber(p.first, p.second).dim * nh;
    }
    g.gram = CMatrix(g.dim, g.dim);
    for (size_t a = 0; a < g.points.size(); ++a)
        for (size_t b = 0; b < g.points.size(); ++b) {
            const auto pn = g.points[a], pm = g.points[b];
            const std::pair<int, int> d{pm.first - pn.first, pm.second - pn.second};
            const auto dp = pos_part(d), dn = neg_part(d);
            const std::pair<int, int> c{std::min(pn.first, pm.first),
                                        std::min(pn.second, pm.second)};
            const CMatrix& phi = kernel.block(d.first, d.second);
            CMatrix un = sys.multiplication(c.first, c.second, dn.first, dn.second);
            CMatrix up = sys.multiplication(c.first, c.second, dp.first, dp.second);
            const int dim_c = sys.fiber(c.first, c.second).dim;
            CMatrix blockv = kron(un, CMatrix::identity(nh)) *
                             kron(CMatrix::identity(dim_c), phi) *
                             kron(up, CMatrix::identity(nh)).adjoint();
            g.gram.set_block(g.offsets[a], g.offsets[b], blockv);
        }
    return g;
}

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

}  // namespace

const CMatrix& ToeplitzKernel::block(int dk, int dm) const {
    auto it = blocks.find({dk, dm});
    if (it == blocks.end())
        throw HorizonExceeded("kernel block (" + std::to_string(dk) + ", " + std::to_string(dm) +
                              ") outside the stored range");
    return it->second;
}

ToeplitzKernel build_kernel(const GridSystem& system, int radius) {
    if (radius > system.horizon)
        throw HorizonExceeded("kernel radius " + std::to_string(radius) + " exceeds horizon " +
                              std::to_string(system.horizon));
    ToeplitzKernel k;
    k.level = system.level;
    k.radius = radius;
    k.system = system;
    for (int dk = -radius; dk <= radius; ++dk)
        for (int dm = -radius; dm <= radius; ++dm) {
            const auto dp = pos_part({dk, dm}), dn = neg_part({dk, dm});
            if (abs1(dp) > system.horizon || abs1(dn) > system.horizon) continue;
            const CMatrix& tp = system.fiber(dp.first, dp.second).ttilde;
            const CMatrix& tn = system.fiber(dn.first, dn.second).ttilde;
            k.blocks[{dk, dm}] = tn.adjoint() * tp;
        }
    return k;
}

PdReport check_pd(const ToeplitzKernel& kernel, double tol) {
    GramForm g = assemble_gram(kernel);
    EigResult e = herm_eig(g.gram, 1e-8 * (1.0 + g.gram.norm_fro()));
    PdReport rep;
    rep.min_eig = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
    rep.pass = rep.min_eig >= -tol;
    if (!rep.pass) {
        rep.witness.resize(size_t(g.dim));
        const int col = g.dim - 1;
        for (int i = 0; i < g.dim; ++i) rep.witness[size_t(i)] = e.eigenvectors(i, col);
    }
    return rep;
}

DilationSpace kolmogorov(const ToeplitzKernel& kernel) {
    GramForm g = assemble_gram(kernel);
    const double scale = std::max(1.0, g.gram.norm_fro());
    const double min_eig = psd_min_eig(g.gram, 1e-8 * (1.0 + scale));
    if (min_eig < -1e-8 * scale) throw NotPD(min_eig);

    DilationSpace ds;
    ds.n_h = kernel.system.n;
    ds.level = kernel.level;
    ds.radius = kernel.radius;
    ds.system = kernel.system;
    ds.points = g.points;
    ds.offsets = g.offsets;
    ds.dim_h0 = g.dim;
    ds.gram = g.gram;
    quotient_coords(g.gram, 1e-10, ds.coords, ds.coords_pinv, ds.dim_k);
    ds.iota = ds.coords.block(0, 0, ds.dim_k, ds.n_h);
    return ds;
}

const CMatrix& DilationSpace::creation(int k, int m) const {
    auto it = creation_cache_.find({k, m});
    if (it != creation_cache_.end()) return it->second;
    if (k < 0 || m < 0 || k + m > radius)
        throw OutOfHorizon(k + m, radius);

    const int dim_s = system.fiber(k, m).dim;
    const int r = dim_k;
    const int budget = radius - (k + m);

    // Lift K coordinates into functions supported on blocks within the depth
    // budget, so the shift drops nothing and the map descends to the quotient.
    std::vector<int> cols;
    for (size_t b = 0; b < points.size(); ++b) {
        if (abs1(points[b]) > budget) continue;
        const int w = system.fiber(points[b].first, points[b].second).dim * n_h;
        for (int c = 0; c < w; ++c) cols.push_back(offsets[b] + c);
    }
    CMatrix vb(r, int(cols.size())), gb(int(cols.size()), int(cols.size()));
    for (size_t a = 0; a < cols.size(); ++a) {
        for (int i = 0; i < r; ++i) vb(i, int(a)) = coords(i, cols[a]);
        for (size_t b = 0; b < cols.size(); ++b) gb(int(a), int(b)) = gram(cols[a], cols[b]);
    }
    CMatrix lift_small = pinv_hermitian(gb, 1e-10) * vb.adjoint();  // cols x r
    CMatrix lift(dim_h0, r);
    for (size_t a = 0; a < cols.size(); ++a)
        for (int j = 0; j < r; ++j) lift(cols[a], j) = lift_small(int(a), j);

    CMatrix vt(r, dim_s * r);
    for (int y = 0; y < dim_s; ++y) {
        // Shift slice for the y-th basis vector of X(s): block m' -> block s+m'
        // through the multiplication identification.
        CMatrix shift_y(dim_h0, dim_h0);
        for (size_t b = 0; b < points.size(); ++b) {
            const auto mp = points[b];
            if (abs1(mp) > budget) continue;
            const std::pair<int, int> tgt{k + mp.first, m + mp.second};
            size_t tgt_idx = 0;
            while (points[tgt_idx] != tgt) ++tgt_idx;
            CMatrix u = system.multiplication(k, m, mp.first, mp.second);
            const int dim_mp = system.fiber(mp.first, mp.second).dim;
            const int dim_t = system.fiber(tgt.first, tgt.second).dim;
            for (int r2 = 0; r2 < dim_t; ++r2)
                for (int x = 0; x < dim_mp; ++x) {
                    const cplx val = u(r2, y * dim_mp + x);
                    if (val == cplx(0.0)) continue;
                    for (int h = 0; h < n_h; ++h)
                        shift_y(offsets[tgt_idx] + r2 * n_h + h, offsets[b] + x * n_h + h) = val;
                }
        }
        vt.set_block(0, y * r, coords * shift_y * lift);
    }
    return creation_cache_.emplace(std::make_pair(k, m), std::move(vt)).first->second;
}

CMatrix DilationSpace::alpha(int k, int m, const CMatrix& b, int depth_b) const {
    if (k < 0 || m < 0 || k + m + depth_b > radius) throw OutOfHorizon(depth_b, radius - k - m);
    const CMatrix& vt = creation(k, m);
    return vt * kron(CMatrix::identity(system.fiber(k, m).dim), b) * vt.adjoint();
}

DilationTheoremReport verify_dilation_theorem(const DilationSpace& ds, double tol) {
    DilationTheoremReport rep;
    rep.dim_k = ds.dim_k;
    const CMatrix q = CMatrix::identity(ds.dim_k) - ds.proj_h();

    for (const auto& s : ds.points) {
        const GridFiber& f = ds.system.fiber(s.first, s.second);
        const CMatrix& vt = ds.creation(s.first, s.second);
        for (int x = 0; x < f.dim; ++x) {
            CMatrix ex(f.dim, 1);
            ex(x, 0) = 1.0;
            CMatrix got = ds.iota.adjoint() * vt * kron(ex, ds.iota);
            rep.compat_residual =
                std::max(rep.compat_residual, (got - f.basis_ops[size_t(x)]).norm_fro());
        }
        CMatrix ann = ds.iota.adjoint() * vt * kron(CMatrix::identity(f.dim), q);
        rep.annihilation_residual = std::max(rep.annihilation_residual, ann.norm_fro());
    }

    for (int dk = -ds.radius; dk <= ds.radius; ++dk)
        for (int dm = -ds.radius; dm <= ds.radius; ++dm) {
            const auto dp = pos_part({dk, dm}), dn = neg_part({dk, dm});
            if (abs1(dp) > ds.radius || abs1(dn) > ds.radius) continue;
            const CMatrix& vp = ds.creation(dp.first, dp.second);
            const CMatrix& vn = ds.creation(dn.first, dn.second);
            const int ddp = ds.system.fiber(dp.first, dp.second).dim;
            const int ddn = ds.system.fiber(dn.first, dn.second).dim;
            CMatrix got = kron(CMatrix::identity(ddn), ds.iota).adjoint() * vn.adjoint() * vp *
                          kron(CMatrix::identity(ddp), ds.iota);
            const CMatrix& tp = ds.system.fiber(dp.first, dp.second).ttilde;
            const CMatrix& tn = ds.system.fiber(dn.first, dn.second).ttilde;
            rep.compression_residual =
                std::max(rep.compression_residual, (got - tn.adjoint() * tp).norm_fro());
        }

    rep.span_rank = gram_rank(ds.coords * ds.coords.adjoint(), 1e-10);
    rep.pass = rep.compat_residual <= tol && rep.compression_residual <= tol &&
               rep.annihilation_residual <= tol && rep.span_rank == rep.dim_k;
    return rep;
}

DilationEqReport verify_dilation_eq(const DilationSpace& ds, const CpSemigroup& r,
                                    const CpSemigroup& s, const std::vector<CMatrix>& probes,
                                    double tol) {
    DilationEqReport rep;
    const CMatrix q = CMatrix::identity(ds.dim_k) - ds.proj_h();
    for (const auto& sg : ds.points) {
        const CMatrix& vt = ds.creation(sg.first, sg.second);
        const int dim_s = ds.system.fiber(sg.first, sg.second).dim;
        const CMatrix id_s = CMatrix::identity(dim_s);
        auto corner = [&](const CMatrix& b) {
            return ds.iota.adjoint() * vt * kron(id_s, b) * vt.adjoint() * ds.iota;
        };
        const Channel& rk = r.at(Dyadic(sg.first, ds.level));
        const Channel& sm = s.at(Dyadic(sg.second, ds.level));
        for (const CMatrix& b : probes) {
            CMatrix a = ds.iota.adjoint() * b * ds.iota;
            rep.max_residual =
                std::max(rep.max_residual, (rk.apply(sm.apply(a)) - corner(b)).norm_fro());
        }
        rep.coinvariance_norm = std::max(rep.coinvariance_norm, corner(q).norm_fro());
    }
    rep.pass = rep.max_residual <= tol && rep.coinvariance_norm <= tol;
    return rep;
}

namespace {

// Orthonormal closure: accept a candidate if its residual against the accepted
// basis is non-negligible; returns the final rank.
struct SpanTracker {
    std::vector<std::vector<cplx>> basis;
    double rel_tol = 1e-8;

    bool add(std::vector<cplx> v) {
        const double scale = vec_norm(v);
        if (scale < 1e-14) return false;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                cplx ip = inner(b, v);
                for (size_t i = 0; i < v.size(); ++i) v[i] -= ip * b[i];
            }
        const double res = vec_norm(v);
        if (res <= rel_tol * scale) return false;
        for (auto& z : v) z /= res;
        basis.push_back(std::move(v));
        return true;
    }
    int rank() const { return int(basis.size()); }
};

int closure_rank(const DilationSpace& ds, const std::vector<CMatrix>& gens) {
    SpanTracker span;
    std::vector<std::vector<cplx>> queue;
    for (int h = 0; h < ds.n_h; ++h) {
        std::vector<cplx> v(size_t(ds.dim_k));
        for (int i = 0; i < ds.dim_k; ++i) v[size_t(i)] = ds.iota(i, h);
        if (span.add(v)) queue.push_back(std::move(v));
    }
    while (!queue.empty() && span.rank() < ds.dim_k) {
        std::vector<std::vector<cplx>> next;
        for (const auto& v : queue)
            for (const CMatrix& g : gens) {
                std::vector<cplx> w = g.apply(v);
                if (span.add(w)) next.push_back(std::move(w));
            }
        queue = std::move(next);
    }
    return span.rank();
}

}  // namespace

MinimalityReport verify_minimality(const DilationSpace& ds, double tol) {
    MinimalityReport rep;
    rep.dim_k = ds.dim_k;
    const int nh = ds.n_h;

    std::vector<CMatrix> units;
    for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nh; ++j)
            units.push_back(ds.iota * CMatrix::unit(nh, i, j) * ds.iota.adjoint());

    std::vector<CMatrix> monomial_gens, partition_gens;
    for (const auto& t : ds.points) {
        if (t.first == 0 && t.second == 0) continue;
        for (const CMatrix& m : units) {
            monomial_gens.push_back(ds.alpha(t.first, t.second, m, 0));
            // Partition form: the composite-index endomorphism evaluated as
            // beta_s(gamma_t(.)).
            if (t.first > 0 && t.second > 0)
                partition_gens.push_back(
                    ds.beta(t.first, ds.gamma(t.second, m, 0), t.second));
            else
                partition_gens.push_back(monomial_gens.back());
        }
    }
    rep.monomial_rank = closure_rank(ds, monomial_gens);
    rep.partition_rank = closure_rank(ds, partition_gens);
    rep.central_support_full = rep.monomial_rank == rep.dim_k;

    // Unit-continuity probe at the smallest grid steps, plus projection
    // monotonicity compressed to H (exact there).
    auto corner_unit = [&](int k, int m) {
        const CMatrix& vt = ds.creation(k, m);
        return ds.iota.adjoint() * vt * vt.adjoint() * ds.iota;
    };
    auto deficit = [&](int k, int m) {
        EigResult e = herm_eig(CMatrix::identity(nh) - corner_unit(k, m), 1e-8);
        return std::max(0.0, e.eigenvalues.front());
    };
    rep.unit_deficit = std::max(deficit(1, 0), deficit(0, 1));
    rep.unit_deficit_monotone = true;
    if (ds.radius >= 2) {
        rep.unit_deficit_monotone = deficit(1, 0) <= deficit(2, 0) + tol &&
                                    deficit(0, 1) <= deficit(0, 2) + tol;
    }
    rep.monotonicity_margin = 0.0;
    for (const auto& t : ds.points)
        for (const auto& s : ds.points) {
            if (t == s || t.first > s.first || t.second > s.second) continue;
            const double m = psd_min_eig(corner_unit(t.first, t.second) -
                                             corner_unit(s.first, s.second),
                                         1e-8);
            rep.monotonicity_margin = std::min(rep.monotonicity_margin, m);
        }

    rep.pass = rep.monomial_rank == rep.dim_k && rep.partition_rank == rep.dim_k &&
               rep.central_support_full && rep.unit_deficit_monotone &&
               rep.monotonicity_margin >= -tol;
    return rep;
}

CrossLevelReport cross_level_check(const CpSemigroup& r, const CpSemigroup& s, int coarse_level,
                                   int radius, double tol) {
    const Dyadic cstep(1, coarse_level), fstep(1, coarse_level + 1);
    FlipUnitary uc = witness_unitary(r.at(cstep), s.at(cstep));
    FlipUnitary uf = witness_unitary(r.at(fstep), s.at(fstep));
    GridSystem coarse = build_system(r, s, coarse_level, radius, uc);
    GridSystem fine = build_system(r, s, coarse_level + 1, 2 * radius, uf);
    ToeplitzKernel kc = build_kernel(coarse, radius);
    ToeplitzKernel kf = build_kernel(fine, 2 * radius);

    // Per-factor compression of two fine steps into one coarse step.
    CMatrix ce = kraus_product_coeffs(r.at(cstep), fine.e_step.ops, fine.e_step.ops);
    CMatrix cf = kraus_product_coeffs(s.at(cstep), fine.f_step.ops, fine.f_step.ops);
    auto factor_map = [&](std::pair<int, int> p) {
        CMatrix c = CMatrix::identity(1);
        for (int i = 0; i < p.first; ++i) c = kron(c, ce);
        for (int i = 0; i < p.second; ++i) c = kron(c, cf);
        return c;
    };

    CrossLevelReport rep;
    const CMatrix id_h = CMatrix::identity(coarse.n);
    for (const auto& [d, phi_c] : kc.blocks) {
        const CMatrix& phi_f = kf.block(2 * d.first, 2 * d.second);
        CMatrix cn = factor_map(neg_part(d));
        CMatrix cp = factor_map(pos_part(d));
        CMatrix got = kron(cn, id_h) * phi_f * kron(cp, id_h).adjoint();
        rep.max_residual = std::max(rep.max_residual, (got - phi_c).norm_fro());
    }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

}  // namespace cpdil
