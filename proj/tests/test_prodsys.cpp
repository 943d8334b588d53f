#include <cmath>
#include <random>
#include <vector>

#include "cpdil/prodsys.hpp"
#include "cpdil/semigroup.hpp"
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

// Conjugation semigroups whose unit-time channels are exactly Ad_Z and Ad_X.
std::pair<CpSemigroup, CpSemigroup> pauli_pair() {
    Generator gz{2, CMatrix::diag({cplx(0.0), cplx(0.0, M_PI)}), {}};
    CMatrix hx = (pauli_x() - CMatrix::identity(2)) * cplx(0.0, M_PI / 2.0);
    Generator gx{2, hx, {}};
    return {CpSemigroup(gz), CpSemigroup(gx)};
}

// Dephasing (off-diagonals decay, unital) and uniform decay (scalar, contractive).
std::pair<CpSemigroup, CpSemigroup> dephasing_decay_pair() {
    Generator dephasing{2, CMatrix::identity(2) * cplx(-0.5), {pauli_z()}};
    Generator decay{2, CMatrix::identity(2) * cplx(-0.35), {}};
    return {CpSemigroup(dephasing), CpSemigroup(decay)};
}

FlipUnitary step_witness(const CpSemigroup& r, const CpSemigroup& s, int level) {
    const Dyadic step(1, level);
    return witness_unitary(r.at(step), s.at(step));
}

std::vector<CMatrix> qubit_probes(unsigned long long seed) {
    std::mt19937_64 rng(seed);
    return {CMatrix::identity(2), pauli_x(), pauli_z(), random_hermitian(2, rng)};
}

}  // namespace

TEST_CASE("fiber dimensions and the vacuum fiber") {
    auto [r, s] = dephasing_decay_pair();
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    const GridFiber& vac = sys.fiber(0, 0);
    CHECK(vac.dim == 1);
    CHECK((vac.ttilde - CMatrix::identity(2)).norm_fro() < 1e-14);
    CHECK(sys.fiber(1, 1).dim == sys.e_step.rank() * sys.f_step.rank());
    CHECK(sys.fiber(2, 1).dim == sys.e_step.rank() * sys.e_step.rank() * sys.f_step.rank());
    CHECK_THROWS_AS(sys.fiber(2, 2), HorizonExceeded);
}

TEST_CASE("unitary-conjugation semigroups give one-dimensional fibers") {
    auto [r, s] = make_endo_pair(2, 42);
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    for (int k = 0; k <= 3; ++k)
        for (int m = 0; k + m <= 3; ++m) {
            CHECK(sys.fiber(k, m).dim == 1);
            CHECK(sys.fiber(k, m).ttilde.norm_op() < 1.0 + 1e-9);
        }
}

TEST_CASE("block rows are contractions on every fiber") {
    auto [r, s] = dephasing_decay_pair();
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    for (int k = 0; k <= 3; ++k)
        for (int m = 0; k + m <= 3; ++m) CHECK(sys.fiber(k, m).ttilde.norm_op() < 1.0 + 1e-9);
}

TEST_CASE("flips and multiplication maps are unitary for a unitary certificate") {
    auto [r, s] = dephasing_decay_pair();
    GridSystem sys = build_system(r, s, 1, 4, step_witness(r, s, 1));
    for (int k = 1; k <= 3; ++k)
        for (int m = 1; k + m <= 4; ++m) {
            CMatrix f = sys.flip(k, m);
            CHECK((f.adjoint() * f - CMatrix::identity(f.cols())).norm_fro() < 1e-10);
        }
    CMatrix u = sys.multiplication(1, 1, 1, 1);
    CHECK((u.adjoint() * u - CMatrix::identity(u.cols())).norm_fro() < 1e-10);
}

TEST_CASE("representation identity holds for dephasing x decay") {
    auto [r, s] = dephasing_decay_pair();
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    ProdsysReport rep = verify_rep_identity(sys, r, s, qubit_probes(9), 1e-9);
    CHECK(rep.pass);
    CHECK(rep.max_defect < 1e-9);
}

TEST_CASE("representation identity holds for an automorphism x CP pair") {
    auto [r, s] = make_aut_cp_pair(2, 7);
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    ProdsysReport rep = verify_rep_identity(sys, r, s, qubit_probes(13), 1e-8);
    CHECK(rep.pass);
}

TEST_CASE("commutation relation with the sign flip for the Pauli pair") {
    auto [r, s] = pauli_pair();
    FlipUnitary u = step_witness(r, s, 0);
    CHECK(std::abs(u.u(0, 0) - cplx(-1.0)) < 1e-12);
    GridSystem sys = build_system(r, s, 0, 3, u);
    ProdsysReport rep = verify_commutation_relation(sys, 1e-12);
    CHECK(rep.pass);
    ProdsysReport rep2 = verify_rep_identity(sys, r, s, qubit_probes(3), 1e-10);
    CHECK(rep2.pass);
}

TEST_CASE("wrong flip certificate is detected") {
    auto [r, s] = pauli_pair();
    FlipUnitary wrong;
    wrong.m_theta = 1;
    wrong.m_phi = 1;
    wrong.u = CMatrix::identity(1);  // true certificate is [-1]
    GridSystem sys = build_system(r, s, 0, 3, wrong);
    ProdsysReport comm = verify_commutation_relation(sys, 1e-9);
    CHECK_FALSE(comm.pass);
    CHECK(comm.max_defect > 1.0);
    ProdsysReport rep = verify_rep_identity(sys, r, s, qubit_probes(5), 1e-9);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("commutation relation for elementwise-commuting Kraus families") {
    auto [r, s] = make_aut_cp_pair(2, 21);
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    ProdsysReport rep = verify_commutation_relation(sys, 1e-9);
    CHECK(rep.pass);
}

TEST_CASE("associativity of the multiplication maps") {
    auto [r, s] = make_aut_cp_pair(2, 31);
    GridSystem sys = build_system(r, s, 1, 3, step_witness(r, s, 1));
    ProdsysReport rep = verify_associativity(sys, 1e-9);
    CHECK(rep.pass);
    CHECK(rep.max_defect < 1e-10);
}

TEST_CASE("associativity is a property of the sorting network, not the certificate") {
    // Concatenation multiplication is associative for any step flip; a corrupted
    // certificate is caught by the representation/commutation sweeps instead.
    auto [r, s] = pauli_pair();
    FlipUnitary wrong;
    wrong.m_theta = 1;
    wrong.m_phi = 1;
    wrong.u = CMatrix::identity(1) * cplx(0.3, 0.1);  // not even unitary
    GridSystem sys = build_system(r, s, 0, 3, wrong);
    CHECK(verify_associativity(sys, 1e-9).pass);
    CHECK_FALSE(verify_rep_identity(sys, r, s, qubit_probes(17), 1e-9).pass);
}
