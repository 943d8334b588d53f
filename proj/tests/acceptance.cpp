// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "cpdil/dilate.hpp"
#include "cpdil/extend.hpp"
#include "cpdil/gns.hpp"
#include "cpdil/numerics.hpp"

using namespace cpdil;

namespace {

int failures = 0;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

void report(int idx, const std::string& what, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " " << idx << ": " << what;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << "\n";
    if (!ok) ++failures;
}

void criterion(int idx, const std::string& what, const std::function<bool(std::string&)>& body) {
    std::string detail;
    try {
        report(idx, what, body(detail), detail);
    } catch (const std::exception& e) {
        report(idx, what, false, std::string("exception: ") + e.what());
    }
}

CMatrix pauli_x() {
    CMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    return x;
}

CMatrix pauli_z() { return CMatrix::diag({cplx(1.0), cplx(-1.0)}); }

Generator dephasing_gen() {
    return Generator{2, CMatrix::identity(2) * cplx(-0.5), {pauli_z()}};
}

Generator decay_gen() { return Generator{2, CMatrix::identity(2) * cplx(-0.35), {}}; }

std::pair<CpSemigroup, CpSemigroup> dephasing_decay() {
    return {CpSemigroup(dephasing_gen()), CpSemigroup(decay_gen())};
}

std::pair<CpSemigroup, CpSemigroup> conjugation_fixture() {
    CMatrix a = CMatrix::identity(2) * cplx(-0.5) + pauli_x() * cplx(0.2);
    CMatrix b = CMatrix::identity(2) * cplx(-0.4) + pauli_x() * cplx(0.1);
    return make_conjugation_pair(a, b);
}

// Commuting CP pair with Kraus families diagonal in a shared random basis.
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

CMatrix random_density(int n, std::mt19937_64& rng) {
    CMatrix a = random_matrix(n, n, rng);
    CMatrix rho = a * a.adjoint();
    return rho * (1.0 / rho.trace().real());
}

GridSystem grid_for(const CpSemigroup& r, const CpSemigroup& s, int level, int horizon) {
    const Dyadic step(1, level);
    return build_system(r, s, level, horizon, witness_unitary(r.at(step), s.at(step)));
}

}  // namespace

int main() {
    criterion(1, "flip certificates over randomized commuting and non-commuting pairs",
              [](std::string& detail) {
                  std::mt19937_64 rng(101);
                  double worst_res = 0.0, worst_unit = 0.0;
                  int commuting = 0, rejected = 0;
                  while (commuting < 50) {
                      const int n = 2 + (commuting % 2);
                      auto [theta, phi] = shared_basis_pair(n, rng, 2);
                      if (!commute_check(theta, phi, 1e-9)) continue;
                      FlipUnitary w = witness_unitary(theta, phi, 1e-9);
                      worst_res = std::max(worst_res, w.residual);
                      CMatrix g = w.u.adjoint() * w.u;
                      worst_unit =
                          std::max(worst_unit, (g - CMatrix::identity(g.rows())).norm_fro());
                      ++commuting;
                  }
                  while (rejected < 50) {
                      const int n = 2 + (rejected % 2);
                      Channel a = Channel::from_kraus(
                          {random_matrix(n, n, rng, 0.6), random_matrix(n, n, rng, 0.4)});
                      Channel b = Channel::from_kraus({random_matrix(n, n, rng, 0.7)});
                      if (commute_check(a, b, 1e-9)) continue;
                      try {
                          witness_unitary(a, b, 1e-9);
                          return false;
                      } catch (const NotCommuting&) {
                          ++rejected;
                      }
                  }
                  detail = "residual " + sci(worst_res) + ", unitarity " +
                           sci(worst_unit);
                  return worst_res <= 1e-9 && worst_unit <= 1e-10;
              });

    criterion(2, "bimodule flip solver agrees with the transported Kraus-level flip",
              [](std::string& detail) {
                  std::mt19937_64 rng(102);
                  std::vector<std::pair<Channel, Channel>> fixtures;
                  fixtures.emplace_back(Channel::from_kraus({pauli_z()}),
                                        Channel::from_kraus({pauli_x()}));
                  fixtures.emplace_back(shared_basis_pair(2, rng, 2));
                  fixtures.emplace_back(
                      Channel::from_kraus({CMatrix::diag({cplx(0.7), cplx(0.3)}),
                                           CMatrix::diag({cplx(0.2), cplx(-0.5)})}),
                      Channel::from_kraus({CMatrix::diag({cplx(0.4), cplx(0.6)}),
                                           CMatrix::diag({cplx(-0.3), cplx(0.2)})}));
                  double worst = 0.0;
                  for (const auto& [th, ph] : fixtures) {
                      FlipWitnessResult res = flip_witness(th, ph, 1e-8);
                      FlipUnitary wu = witness_unitary(th, ph);
                      GnsModule e = gns_module(th), f = gns_module(ph);
                      GnsTensor ef = module_tensor(e, f), fe = module_tensor(f, e);
                      CMatrix wk = flip_from_kraus(th, ph, wu, ef, fe);
                      // The canonical identification pins the flip on the
                      // two-sided orbit of the cyclic vector; compare there.
                      const int n = th.dim();
                      CMatrix orbit(ef.rank, n * n * n * n);
                      for (int a = 0; a < n * n; ++a)
                          for (int c = 0; c < n * n; ++c) {
                              std::vector<cplx> coeff(size_t(n * n) * (n * n) * (n * n));
                              for (int bb = 0; bb < n; ++bb)
                                  coeff[(size_t(a) * (n * n) + (bb * n + bb)) * (n * n) + c] =
                                      1.0;
                              std::vector<cplx> col = ef.coords.apply(coeff);
                              for (int i = 0; i < ef.rank; ++i)
                                  orbit(i, a * n * n + c) = col[size_t(i)];
                          }
                      worst = std::max(worst, ((res.w - wk) * orbit).norm_fro());
                  }
                  // Both constructions must also fail together.
                  Channel bad = Channel::from_kraus({random_matrix(2, 2, rng, 0.6)});
                  Channel cz = Channel::from_kraus({pauli_z()});
                  bool both_fail = false;
                  try {
                      witness_unitary(bad, cz);
                  } catch (const NotCommuting&) {
                      try {
                          flip_witness(bad, cz);
                      } catch (const NotCommuting&) {
                          both_fail = true;
                      }
                  }
                  detail = "map gap " + sci(worst);
                  return worst <= 1e-8 && both_fail;
              });

    criterion(3, "block rows represent the composed semigroup action on the level-2 grid",
              [](std::string& detail) {
                  std::mt19937_64 rng(103);
                  std::vector<CMatrix> probes;
                  for (int i = 0; i < 20; ++i) probes.push_back(random_matrix(2, 2, rng));
                  double worst = 0.0;
                  auto [r1, s1] = dephasing_decay();
                  auto [r2, s2] = conjugation_fixture();
                  worst = std::max(
                      worst,
                      verify_rep_identity(grid_for(r1, s1, 2, 3), r1, s1, probes, 1e-9)
                          .max_defect);
                  worst = std::max(
                      worst,
                      verify_rep_identity(grid_for(r2, s2, 2, 3), r2, s2, probes, 1e-9)
                          .max_defect);
                  detail = "max defect " + sci(worst);
                  return worst <= 1e-9;
              });

    criterion(4, "commutation relation and multiplication associativity on the same fixtures",
              [](std::string& detail) {
                  double worst = 0.0;
                  auto [r1, s1] = dephasing_decay();
                  auto [r2, s2] = conjugation_fixture();
                  for (const GridSystem& sys : {grid_for(r1, s1, 2, 3), grid_for(r2, s2, 2, 3)}) {
                      worst = std::max(worst, verify_commutation_relation(sys, 1e-9).max_defect);
                      worst = std::max(worst, verify_associativity(sys, 1e-9).max_defect);
                  }
                  detail = "max defect " + sci(worst);
                  return worst <= 1e-9;
              });

    criterion(5, "kernel positivity, Kolmogorov compression, and the nilpotent obstruction",
              [](std::string& detail) {
                  auto [r1, s1] = dephasing_decay();
                  auto [r2, s2] = make_aut_cp_pair(2, 33);
                  double min_eig = 0.0, compression = 0.0;
                  bool items = true;
                  std::vector<std::pair<CpSemigroup, CpSemigroup>> pairs{{r1, s1}, {r2, s2}};
                  for (const auto& pr : pairs) {
                      ToeplitzKernel k = build_kernel(grid_for(pr.first, pr.second, 1, 4), 2);
                      PdReport pd = check_pd(k, 1e-10);
                      min_eig = std::min(min_eig, pd.min_eig);
                      DilationTheoremReport thm = verify_dilation_theorem(kolmogorov(k), 1e-9);
                      compression = std::max(compression, thm.compression_residual);
                      items = items && thm.pass;
                  }
                  // Nilpotent conjugation pair: the kernel must fail, and the
                  // classical obstruction operator is exactly diag(-1, 1).
                  CMatrix t(2, 2);
                  t(0, 1) = 1.0;
                  CMatrix obstruction = CMatrix::identity(2) - t * t.adjoint() * 2.0 +
                                        t * (t * t.adjoint()) * t.adjoint();
                  bool obstruction_exact =
                      (obstruction - CMatrix::diag({cplx(-1.0), cplx(1.0)})).norm_max() == 0.0;
                  KrausFiber step{Dyadic(1, 0), {t}};
                  GridSystem nil = build_system_from_steps(step, step, 0, 4,
                                                           CMatrix::identity(1));
                  PdReport bad = check_pd(build_kernel(nil, 2), 1e-10);
                  detail = "min eig " + sci(min_eig) + ", compression " +
                           sci(compression) + ", nilpotent min eig " +
                           sci(bad.min_eig);
                  return min_eig >= -1e-10 && compression <= 1e-9 && items && !bad.pass &&
                         !bad.witness.empty() && obstruction_exact;
              });

    criterion(6, "dilation equation, coinvariance, and minimal spanning", [](std::string& detail) {
        auto [r, s] = dephasing_decay();
        DilationSpace ds = kolmogorov(build_kernel(grid_for(r, s, 1, 4), 2));
        std::mt19937_64 rng(106);
        std::vector<CMatrix> probes;
        for (int i = 0; i < 20; ++i) probes.push_back(random_matrix(ds.dim_k, ds.dim_k, rng));
        DilationEqReport eq = verify_dilation_eq(ds, r, s, probes, 1e-8);
        MinimalityReport min = verify_minimality(ds, 1e-9);
        detail = "eq " + sci(eq.max_residual) + ", coinv " +
                 sci(eq.coinvariance_norm) + ", rank " +
                 std::to_string(min.monomial_rank) + "/" + std::to_string(ds.dim_k);
        return eq.max_residual <= 1e-8 && eq.coinvariance_norm <= 1e-9 &&
               min.monomial_rank == ds.dim_k && min.central_support_full;
    });

    criterion(7, "induced maps are endomorphisms and form a two-parameter semigroup",
              [](std::string& detail) {
                  auto [r, s] = dephasing_decay();
                  DilationSpace ds = kolmogorov(build_kernel(grid_for(r, s, 1, 4), 2));
                  std::mt19937_64 rng(107);
                  CMatrix a = random_matrix(2, 2, rng), b = random_matrix(2, 2, rng);
                  CMatrix ea = ds.iota * a * ds.iota.adjoint();
                  CMatrix eb = ds.iota * b * ds.iota.adjoint();
                  double worst = 0.0;
                  for (const auto& p : ds.points) {
                      if (p.first + p.second == 0) continue;
                      CMatrix lhs = ds.alpha(p.first, p.second,
                                             ds.iota * (a * b) * ds.iota.adjoint(), 0);
                      CMatrix rhs = ds.alpha(p.first, p.second, ea, 0) *
                                    ds.alpha(p.first, p.second, eb, 0);
                      worst = std::max(worst, (lhs - rhs).norm_fro());
                  }
                  for (const auto& p : ds.points)
                      for (const auto& q : ds.points) {
                          const int k = p.first + q.first, m = p.second + q.second;
                          if (k + m > ds.radius) continue;
                          CMatrix direct = ds.alpha(k, m, ea, 0);
                          CMatrix nested = ds.alpha(
                              p.first, p.second, ds.alpha(q.first, q.second, ea, 0),
                              q.first + q.second);
                          worst = std::max(worst, (direct - nested).norm_fro());
                      }
                  detail = "max residual " + sci(worst);
                  return worst <= 1e-9;
              });

    criterion(8, "certified predual bound dominates the true trace distance",
              [](std::string& detail) {
                  std::mt19937_64 rng(108);
                  int checked = 0;
                  for (int trial = 0; trial < 200; ++trial) {
                      const int n = 2 + (trial % 2);
                      CMatrix omega = random_density(n, rng);
                      CMatrix rho = random_density(n, rng);
                      CMatrix u = random_unitary(n, rng);
                      const int r = 1 + int(rng() % size_t(n));
                      CMatrix p(n, n);
                      for (int k = 0; k < r; ++k)
                          for (int i = 0; i < n; ++i)
                              for (int j = 0; j < n; ++j)
                                  p(i, j) += u(i, k) * std::conj(u(j, k));
                      const CMatrix q = CMatrix::identity(n) - p;
                      const double eps =
                          std::max((q * omega).trace().real(), 1e-12) * 1.0000001;
                      auto items = arveson_bound({rho}, omega, p, eps);
                      if (items[0].certified_bound < items[0].true_distance - 1e-12)
                          return false;
                      ++checked;
                  }
                  // Envelope tracking along shrinking escape mass.
                  bool tracks = true;
                  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
                      CMatrix omega = CMatrix::diag({1.0 - eps, eps});
                      CMatrix rho = CMatrix::diag({1.0 - 2.0 * eps, 2.0 * eps});
                      auto items = arveson_bound({rho}, omega, CMatrix::unit(2, 0, 0), eps);
                      tracks = tracks && items[0].certified_bound <= 6.0 * std::sqrt(eps) + eps;
                  }
                  detail = std::to_string(checked) + " triples";
                  return checked == 200 && tracks;
              });

    criterion(9, "dyadic sample tables extend to real time against the exponential oracle",
              [](std::string& detail) {
                  CpSemigroup sg(dephasing_gen());
                  SampledSemigroup ss = tabulate(sg, 20);
                  double worst = 0.0;
                  for (double t : {1.0 / 3.0, std::acos(-1.0) / 10.0}) {
                      ExtendReport rep = extend_to(ss, t, 20);
                      worst = std::max(worst,
                                       (rep.channel.choi() - sg.at(t).choi()).norm_fro());
                  }
                  CMatrix h(2, 2);
                  h(0, 0) = 0.3;
                  h(0, 1) = cplx(0.2, -0.1);
                  h(1, 0) = cplx(0.2, 0.1);
                  h(1, 1) = -0.4;
                  CpSemigroup rot(Generator{2, h * cplx(0.0, -1.0), {}});
                  ExtendReport er = extend_to(tabulate(rot, 20), 1.0 / 3.0, 20);
                  detail = "oracle gap " + sci(worst);
                  return worst <= 1e-8 && er.endomorphism && er.unital;
              });

    criterion(10, "fine-level kernel compresses onto the coarse grid", [](std::string& detail) {
        auto [r1, s1] = dephasing_decay();
        auto [r2, s2] = make_endo_pair(2, 17);
        double worst = 0.0;
        worst = std::max(worst, cross_level_check(r1, s1, 2, 2, 1e-8).max_residual);
        worst = std::max(worst, cross_level_check(r2, s2, 2, 2, 1e-8).max_residual);
        detail = "max residual " + sci(worst);
        return worst <= 1e-8;
    });

    if (failures > 0) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
