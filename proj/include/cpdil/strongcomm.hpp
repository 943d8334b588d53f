#pragma once

#include <vector>

#include "cpdil/channel.hpp"
#include "cpdil/semigroup.hpp"

namespace cpdil {

/// The flip certificate for a strongly commuting pair (Theta, Phi): a unitary u
/// on C^{m_theta * m_phi} with
///   T_i S_j = sum_{(k,l)} u[(i,j)][(k,l)] S_l T_k,
/// rows indexed (i, j) and columns (k, l), i (resp. k) major.
struct FlipUnitary {
    int m_theta = 0;  // Kraus rank of Theta (index i / k)
    int m_phi = 0;    // Kraus rank of Phi (index j / l)
    CMatrix u;
    double residual = 0.0;       // max column residual of the defining relation
    double unitarity_defect = 0.0;
};

/// Decide strong commutativity and construct the flip certificate.
/// Throws NotCommuting when the compositions differ at the Choi level, and
/// WitnessResidual when the constructed u fails to verify (numerical degeneracy).
FlipUnitary witness_unitary(const Channel& theta, const Channel& phi, double tol = 1e-9);

struct SpaceDims {
    int d1 = 0;  // rank of the Gram of M (x)_Phi M (x)_Theta H
    int d2 = 0;  // rank with the roles of Theta and Phi swapped
    double commutation_defect = 0.0;
};

/// Ranks of the two three-fold tensor spaces from the flip definition, spanned by
/// matrix-unit (x) matrix-unit (x) standard-vector families. Unequal ranks certify
/// that the pair is not strongly commuting. Enforces dim <= 3.
SpaceDims space_dims(const Channel& theta, const Channel& phi);

struct CoherenceReport {
    double max_defect = 0.0;
    double max_witness_residual = 0.0;
    bool pass = false;
};

/// Verify the two coherence diagrams for flips along a dyadic grid: composing the
/// step flips and then multiplying agrees with flipping at the combined step,
/// modulo the Kraus-product coefficient maps. Throws NotCommuting if any grid pair
/// fails the commutation precondition, CoherenceDefect if a diagram fails.
CoherenceReport sc_semigroup_check(const CpSemigroup& r, const CpSemigroup& s, int level,
                                   int horizon, double tol);

/// Coefficients of products of step-Kraus operators in the Kraus basis of the
/// combined step: out[alpha][(i, p)] expands T^{(a)}_i T^{(b)}_p over T^{(a+b)}_alpha.
/// A coisometry in the declared-orthonormal fiber coordinates.
CMatrix kraus_product_coeffs(const Channel& step_ab, const std::vector<CMatrix>& fam_a,
                             const std::vector<CMatrix>& fam_b);

/// Fixture: two commuting unitary-conjugation (automorphism) semigroups from
/// Hermitians sharing an eigenbasis drawn from the seed.
std::pair<CpSemigroup, CpSemigroup> make_endo_pair(int n, unsigned long long seed);

/// Fixture: an automorphism semigroup and a commuting genuinely-CP semigroup
/// (jumps diagonal in the shared eigenbasis, strictly contractive).
std::pair<CpSemigroup, CpSemigroup> make_aut_cp_pair(int n, unsigned long long seed);

/// Fixture: conjugation semigroups a -> e^{tA} a e^{tA*}, e^{tB} a e^{tB*} for
/// commuting dissipative seeds. Throws SeedsNotCommuting if AB != BA.
std::pair<CpSemigroup, CpSemigroup> make_conjugation_pair(const CMatrix& a, const CMatrix& b,
                                                          double tol = 1e-10);

}  // namespace cpdil
