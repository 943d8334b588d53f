#include "cpdil/semigroup.hpp"

#include <cmath>

#include "cpdil/numerics.hpp"

namespace cpdil {

Dyadic::Dyadic(long long n, int l) : num(n), log2den(l) {
    if (log2den < 0) throw Error("dyadic denominator exponent must be nonnegative");
    while (log2den > 0 && num % 2 == 0) {
        num /= 2;
        --log2den;
    }
    if (num == 0) log2den = 0;
}

double Dyadic::value() const { return std::ldexp(double(num), -log2den); }

Dyadic Dyadic::operator+(const Dyadic& o) const {
    const int l = std::max(log2den, o.log2den);
    return Dyadic((num << (l - log2den)) + (o.num << (l - o.log2den)), l);
}

bool Dyadic::operator<(const Dyadic& o) const {
    const int l = std::max(log2den, o.log2den);
    return (num << (l - log2den)) < (o.num << (l - o.log2den));
}

CMatrix Generator::dissipation() const {
    CMatrix d = G + G.adjoint();
    for (const auto& l : jumps) d += l.adjoint() * l;
    return d;
}

double Generator::dissipation_excess() const {
    CMatrix d = dissipation();
    EigResult e = herm_eig(d, 1e-8 * (1.0 + d.norm_fro()));
    return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
}

CpSemigroup::CpSemigroup(Generator gen) : gen_(std::move(gen)) {
    const int n = gen_.dim;
    if (gen_.G.rows() != n || gen_.G.cols() != n) throw DimensionMismatch("generator G size");
    for (const auto& l : gen_.jumps)
        if (l.rows() != n || l.cols() != n) throw DimensionMismatch("generator jump size");
    // vec(G* a) = (I (x) G*) vec(a); vec(a G) = (G^T (x) I) vec(a);
    // vec(L* a L) = (L^T (x) L*) vec(a)  [column-major vec].
    const CMatrix id = CMatrix::identity(n);
    superL_ = kron(gen_.G.transpose(), id) + kron(id, gen_.G.adjoint());
    for (const auto& l : gen_.jumps) superL_ += kron(l.transpose(), l.adjoint());
}

Channel CpSemigroup::at(double t) const {
    if (t < 0.0) throw NegativeTime();
    return Channel::from_superop(expm(superL_ * cplx(t)), 1e-7);
}

const Channel& CpSemigroup::at(const Dyadic& t) const {
    if (t.num < 0) throw NegativeTime();
    auto key = std::make_pair(t.num, t.log2den);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, at(t.value())).first;
    return it->second;
}

std::vector<Dyadic> dyadic_grid(int level, int count) {
    std::vector<Dyadic> g;
    for (long long k = 0; k <= count; ++k) g.emplace_back(k, level);
    return g;
}

LawReport verify_semigroup_law(const CpSemigroup& sg, const std::vector<Dyadic>& grid,
                               double tol) {
    LawReport rep;
    for (const auto& s : grid)
        for (const auto& t : grid) {
            const Channel& both = sg.at(s + t);
            double r = (both.choi() - sg.at(s).compose(sg.at(t)).choi()).norm_fro();
            rep.max_residual = std::max(rep.max_residual, r);
        }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

ContinuityReport verify_continuity(const CpSemigroup& r, const CpSemigroup& s, int level,
                                   int count, const std::vector<CMatrix>& probe_ops,
                                   const std::vector<std::vector<cplx>>& probe_vecs) {
    if (r.dim() != s.dim()) throw DimensionMismatch("continuity probe dims");

    auto modulus_at = [&](int lev, int cnt) {
        // Max over grid neighbors (one step in either parameter) of
        // |P_(s,t)(a) h - P_(s',t')(a) h|.
        double m = 0.0;
        auto grid = dyadic_grid(lev, cnt);
        for (size_t i = 0; i + 1 < grid.size(); ++i)
            for (size_t j = 0; j + 1 < grid.size(); ++j) {
                for (const auto& a : probe_ops) {
                    CMatrix p00 = r.at(grid[i]).apply(s.at(grid[j]).apply(a));
                    CMatrix p10 = r.at(grid[i + 1]).apply(s.at(grid[j]).apply(a));
                    CMatrix p01 = r.at(grid[i]).apply(s.at(grid[j + 1]).apply(a));
                    for (const auto& h : probe_vecs) {
                        auto d1 = (p10 - p00).apply(h);
                        auto d2 = (p01 - p00).apply(h);
                        m = std::max({m, vec_norm(d1), vec_norm(d2)});
                    }
                }
            }
        return m;
    };

    ContinuityReport rep;
    rep.modulus = modulus_at(level, count);
    rep.refined_modulus = modulus_at(level + 1, 2 * count);

    const double lr = r.superop_gen().norm_op();
    const double ls = s.superop_gen().norm_op();
    const double lnorm = lr + ls;
    const double horizon = std::ldexp(double(count), -level);
    const double delta = std::ldexp(1.0, -level);
    double amax = 0.0, hmax = 0.0;
    for (const auto& a : probe_ops) amax = std::max(amax, a.norm_op());
    for (const auto& h : probe_vecs) hmax = std::max(hmax, vec_norm(h));
    rep.certified_bound = std::exp(lnorm * horizon) * lnorm * delta * amax * hmax;

    const double noise = 1e-12;
    rep.pass = rep.refined_modulus <= std::max(0.75 * rep.modulus, noise) &&
               rep.modulus <= rep.certified_bound + noise;
    return rep;
}

}  // namespace cpdil
