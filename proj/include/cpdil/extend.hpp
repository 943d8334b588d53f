#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "cpdil/semigroup.hpp"

namespace cpdil {

/// Quantitative trace-norm bound: for densities rho, omega with omega(1-p) <= eps,
/// || rho - omega ||_1 <= || p (rho - omega) p ||_1 + 2 eps^{1/2} + 4 eps^{1/2}
/// once rho(1-p) <= 2 eps holds. The corner term is computed exactly.
struct ArvesonBoundItem {
    double certified_bound = 0.0;
    double true_distance = 0.0;   // || rho - omega ||_1
    double corner_term = 0.0;     // || p (rho - omega) p ||_1
    double rho_escape = 0.0;      // rho(1 - p)
    bool escape_small = false;    // rho(1 - p) <= 2 eps
};

/// Throws BadProjection if p is not a (Hermitian idempotent) projection and
/// EpsilonViolated if omega(1 - p) > eps. When a rho escapes the corner by more
/// than 2 eps, the bound falls back to the gentle-compression estimate driven by
/// rho(1 - p) itself, so certified_bound >= true_distance always.
std::vector<ArvesonBoundItem> arveson_bound(const std::vector<CMatrix>& rhos,
                                            const CMatrix& omega, const CMatrix& p, double eps);

/// A CP-semigroup known only through exact-dyadic-time samples.
struct SampledSemigroup {
    int n = 0;
    std::map<Dyadic, Channel> table;

    /// Max over tabulated (s, t) with s + t tabulated of the Choi defect of
    /// table[s+t] vs table[s] o table[t]; also requires table[0] = identity.
    double law_defect() const;
    /// Evaluate at an exact dyadic time by greedy composition of table entries.
    /// A directly tabulated time returns that entry bit-for-bit.
    /// Throws InsufficientTable when the time is not reachable.
    Channel eval(const Dyadic& t) const;
};

/// Tabulate t = 0 and the halving chain 1/2^j, j = 0..depth.
SampledSemigroup tabulate(const CpSemigroup& sg, int depth);

struct ExtendReport {
    Channel channel = Channel::identity(1);
    Dyadic time;                      // the depth-level dyadic approximant used
    std::vector<double> step_deltas;  // predual distance between approximants k, k+1
    bool exact_hit = false;           // t was an exactly tabulated dyadic
    bool cp = false, contractive = false, unital = false, endomorphism = false;
};

/// Extend the sampled semigroup to real time t through the dyadic approximants
/// d_k = floor(t 2^k) / 2^k, k = 0..depth. The per-step predual distances (max
/// over a Hermitian density basis of || rho o phi_{d_k} - rho o phi_{d_{k+1}} ||_1)
/// must decay geometrically (e_{k+2} <= 0.75 e_k up to noise floor), otherwise
/// NotCauchy. Throws InsufficientTable when an approximant is unreachable.
ExtendReport extend_to(const SampledSemigroup& ss, double t, int depth);

/// Real-time one-parameter evaluator, e.g. [&sg](double t){ return sg.at(t); } or
/// an extend_to wrapper over a sample table.
using RealTimeSemigroup = std::function<Channel(double)>;

/// Two-parameter evaluator assembled as the composition of two one-parameter
/// evaluators applied in a fixed order.
struct TwoParamEvaluator {
    RealTimeSemigroup beta, gamma;
    Channel at(double s, double t) const;
    /// Choi defect of the order swap at (s, t).
    double swap_residual(double s, double t) const;
};

/// Assemble the two-parameter evaluator; requires the factors to commute on the
/// given time grid (Choi defect <= tol), otherwise NotCommuting.
TwoParamEvaluator two_param_assemble(RealTimeSemigroup beta, RealTimeSemigroup gamma,
                                     const std::vector<std::pair<double, double>>& commute_grid,
                                     double tol);

struct TwoParamReport {
    double max_semigroup_residual = 0.0;  // at(s+s', t+t') vs at(s,t) o at(s',t')
    double max_swap_residual = 0.0;
    bool pass = false;
};

TwoParamReport verify_two_param(const TwoParamEvaluator& ev,
                                const std::vector<std::pair<double, double>>& pts, double tol);

}  // namespace cpdil
