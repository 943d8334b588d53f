#include <cmath>
#include <random>

#include "cpdil/numerics.hpp"
#include "cpdil/strongcomm.hpp"
#include "doctest.h"

using namespace cpdil;

namespace {

CMatrix pauli_x() {
    CMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    return x;
}

CMatrix pauli_z() { return CMatrix::diag({cplx(1.0), cplx(-1.0)}); }

// Commuting CP pair with Kraus families diagonal in a shared unitary basis.
std::pair<Channel, Channel> shared_basis_pair(int n, std::mt19937_64& rng, int rank) {
    CMatrix q = random_unitary(n, rng);
    std::normal_distribution<double> g;
    auto make = [&]() {
        std::vector<CMatrix> ops;
        for (int t = 0; t < rank; ++t) {
            CMatrix d(n, n);
            for (int i = 0; i < n; ++i) d(i, i) = cplx(0.6 * g(rng), 0.6 * g(rng));
            ops.push_back(q * d * q.adjoint());
        }
        return Channel::from_kraus(ops);
    };
    return {make(), make()};
}

}  // namespace

TEST_CASE("witness for a channel against itself (conjugation)") {
    std::mt19937_64 rng(21);
    CMatrix u = random_unitary(2, rng);
    Channel c = Channel::from_kraus({u});
    FlipUnitary w = witness_unitary(c, c, 1e-9);
    REQUIRE(w.u.rows() == 1);
    CHECK(std::abs(w.u(0, 0) - cplx(1.0)) <= 1e-10);
    CHECK(w.residual <= 1e-10);
}

TEST_CASE("Pauli X against Pauli Z gives u = [-1]") {
    Channel cx = Channel::from_kraus({pauli_x()});
    Channel cz = Channel::from_kraus({pauli_z()});
    FlipUnitary w = witness_unitary(cx, cz, 1e-9);
    REQUIRE(w.u.rows() == 1);
    CHECK(std::abs(w.u(0, 0) - cplx(-1.0)) <= 1e-10);
}

TEST_CASE("elementwise-commuting Kraus families give the identity pairing") {
    Channel theta = Channel::from_kraus(
        {CMatrix::diag({cplx(0.7), cplx(0.3)}), CMatrix::diag({cplx(0.2), cplx(-0.5)})});
    Channel phi = Channel::from_kraus(
        {CMatrix::diag({cplx(0.4), cplx(0.6)}), CMatrix::diag({cplx(-0.3), cplx(0.2)})});
    FlipUnitary w = witness_unitary(theta, phi, 1e-9);
    CHECK(w.residual <= 1e-10);
    CHECK((w.u - CMatrix::identity(w.u.rows())).norm_fro() <= 1e-9);
}

TEST_CASE("non-commuting pair raises NotCommuting") {
    std::mt19937_64 rng(22);
    Channel cx = Channel::from_kraus({pauli_x()});
    Channel generic = Channel::from_kraus({random_matrix(2, 2, rng, 0.6), random_matrix(2, 2, rng, 0.4)});
    CHECK_THROWS_AS(witness_unitary(cx, generic, 1e-9), NotCommuting);
}

TEST_CASE("randomized commuting pairs on M2 and M3 certify with tight residuals") {
    std::mt19937_64 rng(23);
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 10; ++trial) {
            auto [theta, phi] = shared_basis_pair(n, rng, 2);
            REQUIRE(commute_check(theta, phi, 1e-9));
            FlipUnitary w = witness_unitary(theta, phi, 1e-9);
            CHECK(w.residual <= 1e-9);
            CHECK(w.unitarity_defect <= 1e-10);
            // Unitarity restated: the flip preserves inner products.
            CMatrix g = w.u.adjoint() * w.u;
            CHECK((g - CMatrix::identity(g.rows())).norm_fro() <= 1e-10);
        }
    }
}

TEST_CASE("space_dims on identity pair collapses to dim H") {
    Channel id = Channel::identity(2);
    SpaceDims d = space_dims(id, id);
    CHECK(d.d1 == 2);
    CHECK(d.d2 == 2);
    CHECK(d.commutation_defect <= 1e-12);
}

TEST_CASE("space_dims equality on commuting pairs; tracial channel case") {
    // tau(.) I against the identity channel on M2.
    const double h = 0.5;
    Channel tr = Channel::from_kraus({CMatrix::unit(2, 0, 0) * cplx(std::sqrt(h)),
                                      CMatrix::unit(2, 0, 1) * cplx(std::sqrt(h)),
                                      CMatrix::unit(2, 1, 0) * cplx(std::sqrt(h)),
                                      CMatrix::unit(2, 1, 1) * cplx(std::sqrt(h))});
    Channel id = Channel::identity(2);
    REQUIRE(commute_check(tr, id, 1e-9));
    SpaceDims d = space_dims(tr, id);
    CHECK(d.d1 == d.d2);

    std::mt19937_64 rng(24);
    auto [theta, phi] = shared_basis_pair(2, rng, 2);
    SpaceDims d2 = space_dims(theta, phi);
    CHECK(d2.d1 == d2.d2);
}

TEST_CASE("space_dims enforces the dimension cap") {
    Channel id4 = Channel::identity(4);
    CHECK_THROWS_AS(space_dims(id4, id4), DimTooLarge);
}

TEST_CASE("coherence diagrams pass for commuting automorphism semigroups") {
    auto [r, s] = make_endo_pair(2, 31);
    REQUIRE(commute_check(r.at(0.5), s.at(0.5), 1e-9));
    auto rep = sc_semigroup_check(r, s, 1, 3, 1e-8);
    CHECK(rep.pass);
    CHECK(rep.max_defect <= 1e-8);
    CHECK(rep.max_witness_residual <= 1e-9);
}

TEST_CASE("coherence diagrams pass for automorphism against CP semigroup") {
    auto [r, s] = make_aut_cp_pair(2, 32);
    REQUIRE(commute_check(r.at(0.5), s.at(0.5), 1e-9));
    auto rep = sc_semigroup_check(r, s, 1, 3, 1e-8);
    CHECK(rep.pass);
}

TEST_CASE("coherence diagrams pass for commuting conjugation semigroups") {
    std::mt19937_64 rng(33);
    CMatrix q = random_unitary(2, rng);
    std::normal_distribution<double> g;
    CMatrix da(2, 2), db(2, 2);
    for (int i = 0; i < 2; ++i) {
        da(i, i) = cplx(-0.4 - 0.3 * std::abs(g(rng)), g(rng));
        db(i, i) = cplx(-0.2 - 0.5 * std::abs(g(rng)), g(rng));
    }
    CMatrix a = q * da * q.adjoint(), b = q * db * q.adjoint();
    auto [r, s] = make_conjugation_pair(a, b);
    REQUIRE(commute_check(r.at(0.5), s.at(0.5), 1e-9));
    auto rep = sc_semigroup_check(r, s, 1, 3, 1e-8);
    CHECK(rep.pass);

    // Fibers are rank one: steps are conjugations by e^{tA}.
    CHECK(r.at(0.5).minimal_kraus().rank() == 1);
}

TEST_CASE("make_conjugation_pair rejects non-commuting seeds") {
    CMatrix a = CMatrix::diag({cplx(-1.0), cplx(-2.0)});
    CMatrix b = pauli_x() - CMatrix::identity(2) * cplx(3.0);
    CHECK_THROWS_AS(make_conjugation_pair(a, b), SeedsNotCommuting);
}

TEST_CASE("witness success implies equal tensor-space dimensions") {
    std::mt19937_64 rng(34);
    auto [theta, phi] = shared_basis_pair(2, rng, 2);
    witness_unitary(theta, phi, 1e-9);  // must not throw
    SpaceDims d = space_dims(theta, phi);
    CHECK(d.d1 == d.d2);
}
