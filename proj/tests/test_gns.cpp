#include <complex>
#include <random>
#include <vector>

#include "cpdil/channel.hpp"
#include "cpdil/gns.hpp"
#include "cpdil/numerics.hpp"
#include "cpdil/strongcomm.hpp"
#include "doctest.h"

using namespace cpdil;

namespace {

Channel unitary_conj(const CMatrix& u) {
    return Channel::from_kraus({u});
}

Channel trace_channel(int n) {
    // a -> tau(a) 1, Kraus ops E_ij / sqrt(n).
    std::vector<CMatrix> ops;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ops.push_back(CMatrix::unit(n, i, j) * cplx(1.0 / std::sqrt(double(n))));
    return Channel::from_kraus(ops);
}

}  // namespace

TEST_CASE("gns module of the identity channel has full rank n^2") {
    for (int n = 2; n <= 3; ++n) {
        GnsModule e = gns_module(Channel::identity(n));
        CHECK(e.rank == n * n);
    }
}

TEST_CASE("gns module of the normalized-trace channel on M2 has rank 16") {
    GnsModule e = gns_module(trace_channel(2));
    CHECK(e.rank == 16);
}

TEST_CASE("gns cyclic vector reproduces the channel") {
    std::mt19937_64 rng(11);
    CMatrix u = random_unitary(2, rng);
    Channel th = unitary_conj(u);
    GnsModule e = gns_module(th);
    // <xi, E_pq xi> = Theta(E_pq), checked through the public inner product.
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            std::vector<cplx> axi(16, 0.0);
            for (int k = 0; k < 2; ++k) axi[size_t(p * 2 + q) * 4 + (k * 2 + k)] = 1.0;
            CMatrix got = gns_mvalued_inner(e, e.xi, axi);
            CHECK((got - th.apply(CMatrix::unit(2, p, q))).norm_fro() < 1e-11);
        }
}

TEST_CASE("gns module rejects dimensions above three") {
    CHECK_THROWS_AS(gns_module(Channel::identity(4)), DimTooLarge);
}

TEST_CASE("coords is an isometry from the quotient onto C^rank") {
    GnsModule e = gns_module(Channel::identity(2));
    // gram == coords* coords and coords coords_pinv == I_rank.
    CHECK((e.gram - e.coords.adjoint() * e.coords).norm_fro() < 1e-10);
    CHECK((e.coords * e.coords_pinv - CMatrix::identity(e.rank)).norm_fro() < 1e-10);
}

TEST_CASE("module tensor of identity channels has rank 4 on M2") {
    GnsModule e = gns_module(Channel::identity(2));
    GnsTensor t = module_tensor(e, e);
    CHECK(t.rank == 4);
    CHECK((t.gram - t.coords.adjoint() * t.coords).norm_fro() < 1e-10);
}

TEST_CASE("tensor inner product of the cyclic pair is Phi(Theta(1))") {
    std::mt19937_64 rng(5);
    CMatrix u = random_unitary(2, rng);
    Channel th = unitary_conj(u);
    Channel ph = Channel::from_kraus({CMatrix::identity(2) * cplx(0.8)});
    GnsModule e = gns_module(th);
    GnsModule f = gns_module(ph);
    GnsTensor t = module_tensor(e, f);
    CMatrix got = tensor_mvalued_inner(t, t.xi_eta, t.xi_eta);
    CMatrix want = ph.apply(th.apply(CMatrix::identity(2)));
    CHECK((got - want).norm_fro() < 1e-11);
}

TEST_CASE("tensor actions represent the matrix-unit algebra") {
    std::mt19937_64 rng(7);
    CMatrix u = random_unitary(2, rng);
    GnsModule e = gns_module(unitary_conj(u));
    GnsTensor t = module_tensor(e, e);
    // E_01 E_10 = E_00, E_01 E_01 = 0, and left/right actions commute.
    CMatrix l01 = tensor_left_action(t, 0, 1), l10 = tensor_left_action(t, 1, 0);
    CMatrix l00 = tensor_left_action(t, 0, 0);
    CHECK((l01 * l10 - l00).norm_fro() < 1e-9);
    CHECK((l01 * l01).norm_fro() < 1e-9);
    CMatrix r01 = tensor_right_action(t, 0, 1), r10 = tensor_right_action(t, 1, 0);
    CHECK((r10 * r01 - tensor_right_action(t, 0, 0)).norm_fro() < 1e-9);
    CHECK((l01 * r10 - r10 * l01).norm_fro() < 1e-9);
    // Right action composes with reversed order: (x b) b' = x (b b').
    CHECK((r01 * r10 - tensor_right_action(t, 1, 1)).norm_fro() < 1e-9);
}

TEST_CASE("flip witness for commuting unitary conjugations") {
    CMatrix h = CMatrix::diag({cplx(0.3), cplx(-0.9)});
    CMatrix k = CMatrix::diag({cplx(1.1), cplx(0.2)});
    CMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    // Share an eigenbasis through a fixed rotation.
    std::mt19937_64 rng(3);
    CMatrix q = random_unitary(2, rng);
    Channel th = unitary_conj(q * expm(h * cplx(0.0, 1.0)) * q.adjoint());
    Channel ph = unitary_conj(q * expm(k * cplx(0.0, 1.0)) * q.adjoint());
    FlipWitnessResult res = flip_witness(th, ph, 1e-8);
    CHECK(res.constraint_residual < 1e-8);
    CHECK(res.unitarity_defect < 1e-8);
}

TEST_CASE("flip witness matches the transported Kraus-level flip") {
    Channel th = unitary_conj(CMatrix::diag({cplx(1.0), cplx(-1.0)}));
    CMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    Channel ph = unitary_conj(x);  // Z and X commute up to phase, so Ad's commute
    FlipWitnessResult res = flip_witness(th, ph, 1e-8);
    FlipUnitary wu = witness_unitary(th, ph);
    GnsModule e = gns_module(th), f = gns_module(ph);
    GnsTensor ef = module_tensor(e, f), fe = module_tensor(f, e);
    CMatrix wk = flip_from_kraus(th, ph, wu, ef, fe);
    // Both are bimodule flips with the same cyclic-exchange normalization.
    std::vector<cplx> z = ef.coords.apply(ef.xi_eta);
    std::vector<cplx> zp = fe.coords.apply(fe.xi_eta);
    std::vector<cplx> wz = wk.apply(z);
    double d = 0.0;
    for (size_t i = 0; i < wz.size(); ++i) d += std::norm(wz[i] - zp[i]);
    CHECK(std::sqrt(d) < 1e-9);
    CHECK((res.w - wk).norm_fro() < 1e-7);
}

TEST_CASE("kraus-level flip intertwines the bimodule actions") {
    std::mt19937_64 rng(19);
    CMatrix q = random_unitary(2, rng);
    Channel th = unitary_conj(q * CMatrix::diag({cplx(1.0), cplx(-1.0)}) * q.adjoint());
    Channel ph = unitary_conj(q * CMatrix::diag({cplx(0.0, 1.0), cplx(1.0)}) * q.adjoint());
    FlipUnitary wu = witness_unitary(th, ph);
    GnsModule e = gns_module(th), f = gns_module(ph);
    GnsTensor ef = module_tensor(e, f), fe = module_tensor(f, e);
    CMatrix wk = flip_from_kraus(th, ph, wu, ef, fe);
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            worst = std::max(worst, (wk * tensor_left_action(ef, i, j) -
                                     tensor_left_action(fe, i, j) * wk)
                                        .norm_fro());
            worst = std::max(worst, (wk * tensor_right_action(ef, i, j) -
                                     tensor_right_action(fe, i, j) * wk)
                                        .norm_fro());
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("flip witness requires commuting channels") {
    std::mt19937_64 rng(23);
    Channel th = unitary_conj(random_unitary(2, rng));
    Channel ph = unitary_conj(random_unitary(2, rng));
    CHECK_THROWS_AS(flip_witness(th, ph, 1e-9), NotCommuting);
}
