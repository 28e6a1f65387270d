// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "brute_force_si.hpp"
#include "cli.hpp"
#include "sidecomp/commutant.hpp"
#include "sidecomp/decomposition.hpp"
#include "sidecomp/k_invariant.hpp"
#include "sidecomp/planted.hpp"
#include "sidecomp/rkhs.hpp"

namespace sidecomp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome planted_recovery() {
  const auto t0 = Clock::now();
  int ok = 0;
  std::string failed;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::uint64_t seed = Rng::mix(kDefaultSeed, i);
    const auto inst = random_planted(seed);
    try {
      const auto inv = v_semigroup_invariant(inst.tuple);
      if (inv.k == inst.k() && inv.multiplicities == inst.multiplicities()) {
        ++ok;
        continue;
      }
    } catch (const std::exception&) {
    }
    failed += " " + std::to_string(seed);
  }
  const double secs = seconds_since(t0);
  return {ok == 100 && secs < 60.0, fmt("%.0f/100 recovered in %.1f s", ok, secs) + (failed.empty() ? "" : "; seeds" + failed)};
}

Outcome inflation_identity() {
  int ok = 0, total = 0;
  NumericPolicy policy;
  policy.commute_tol = policy.idem_tol = policy.kernel_tol = policy.inv_tol = 1e-8;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = random_commuting_tuple(Rng::mix(kDefaultSeed, 1000 + s), 6, 3);
    for (Index n : {2, 3}) {
      ++total;
      const auto c = inflation_commutant_check(t, n, policy);
      if (c.inflated_dim == n * n * c.base_dim) ++ok;
    }
  }
  return {ok == total, fmt("%.0f/%.0f dimension identities hold", ok, total)};
}

Outcome oracle_equivalence() {
  const auto corpus = oracle::small_corpus();
  int ok = 0;
  std::string failed;
  for (const auto& nt : corpus) {
    if (oracle::oracle_strongly_irreducible(nt.tuple, kDefaultSeed) == is_strongly_irreducible(nt.tuple)) ++ok;
    else failed += " " + nt.name;
  }
  return {ok == static_cast<int>(corpus.size()),
          fmt("%.0f/%.0f corpus tuples agree", ok, static_cast<double>(corpus.size())) + failed};
}

Outcome similarity_criterion() {
  static const Complex lambdas[] = {0.0, 1.0, -1.0, Complex(0.0, 1.0), 2.0};
  int correct = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(Rng::mix(kDefaultSeed, 5000 + static_cast<std::uint64_t>(i)));
    const Index r = 1 + rng.uniform_index(4);
    const Index arity = 1 + rng.uniform_index(2);
    const Index li = rng.uniform_index(5);
    const auto base = block_tuple({r, lambdas[li]}, arity);
    const double cond_t = std::exp(rng.uniform(0.0, std::log(100.0)));
    const auto t = conjugate(base, random_conjugator(rng, r, cond_t));
    const bool want = i < 25;
    OperatorTuple s;
    if (want) {
      const double cond_s = std::exp(rng.uniform(0.0, std::log(100.0)));
      s = conjugate(base, random_conjugator(rng, r, cond_s));
    } else {
      const Index lj = (li + 1 + rng.uniform_index(4)) % 5;
      s = conjugate(block_tuple({r, lambdas[lj]}, arity), random_conjugator(rng, r, 10.0));
    }
    try {
      const auto v = similar(t, s, {}, true);
      if (v.similar != want) continue;
      if (v.similar) {
        if (!v.witness) continue;
        const Matrix x = *v.witness;
        const Matrix xinv = x.inverse();
        double res = 0.0;
        for (Index k = 0; k < arity; ++k) res = std::max(res, (x * t[k] * xinv - s[k]).norm());
        worst = std::max(worst, res);
        if (res > 1e-6) continue;
      }
      ++correct;
    } catch (const std::exception&) {
    }
  }
  return {correct == 50, fmt("%.0f/50 verdicts correct, worst witness residual %.2e", correct, worst)};
}

Outcome drury_arveson_identities() {
  const auto t0 = Clock::now();
  double defect = 0.0, coeff = 0.0, vanish = 0.0, min_eig = 0.0, min_gap = 0.0;
  for (Index m : {2, 3})
    for (Index dmax : {4, 8}) {
      const TruncationGrid g(m, dmax);
      const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(m), g, ShiftMode::adjoint);
      defect = std::max(defect, defect_operator(a).vacuum_residual);
      for (Index j = 1; j < g.size(); ++j) {
        const auto& alpha = g[j];
        for (Index i = 0; i < m; ++i) {
          if (alpha[static_cast<std::size_t>(i)] == 0) continue;
          MultiIndex lower = alpha;
          --lower[static_cast<std::size_t>(i)];
          const double expect = std::sqrt(static_cast<double>(alpha[static_cast<std::size_t>(i)]) / degree(alpha));
          coeff = std::max(coeff, std::abs(a[i](*g.find(lower), j) - expect));
        }
      }
      const auto ps = p_sequence(a, g, dmax);
      vanish = std::max(vanish, ps.vanishing);
      for (double e : ps.min_eig) min_eig = std::min(min_eig, e);
      for (double e : ps.min_gap_eig) min_gap = std::min(min_gap, e);
    }
  const double secs = seconds_since(t0);
  const bool pass = defect <= 1e-12 && coeff <= 1e-14 && vanish == 0.0 && min_eig >= -1e-10 && min_gap >= -1e-10 &&
                    secs < 10.0;
  return {pass, fmt("defect %.1e, coefficient %.1e, vanishing %.1e", defect, coeff, vanish) +
                    fmt(", min eig %.1e, min gap %.1e, %.2f s", min_eig, min_gap, secs)};
}

Outcome joint_eigenvector_residual() {
  const auto spec = DiagonalKernelSpec::drury_arveson(2);
  const std::vector<Complex> w{0.3, 0.2};
  const double r12 = joint_eigenvector(spec, TruncationGrid(2, 12), w).residual;
  const double r16 = joint_eigenvector(spec, TruncationGrid(2, 16), w).residual;
  return {r12 <= 1e-3 && r16 < r12, fmt("residual %.3e at degree 12, %.3e at degree 16", r12, r16)};
}

Outcome bergman_norms() {
  double worst = 0.0;
  for (double k : {2.0, 3.0}) {
    const TruncationGrid g(1, 10);
    const auto f = truncated_tuple(DiagonalKernelSpec::bergman(1, k), g, ShiftMode::forward);
    const RealVector built = constructed_monomial_norms(f, g);
    for (Index j = 0; j < g.size(); ++j) {
      const int n = g[j][0];
      const double expect = std::tgamma(n + 1.0) * std::tgamma(k) / std::tgamma(k + n);
      worst = std::max(worst, std::abs(built(j) - expect) / expect);
    }
  }
  return {worst <= 1e-12, fmt("max relative error %.2e", worst)};
}

Outcome spherical_shift_orders() {
  double perm_diff = 0.0, iso = 0.0;
  for (Index m : {2, 3}) {
    const TruncationGrid a(m, 6, GridOrder::graded_lex), b(m, 6, GridOrder::graded_colex);
    const auto va = spherical_shift(a), vb = spherical_shift(b);
    Matrix p = Matrix::Zero(a.size(), a.size());
    for (Index j = 0; j < a.size(); ++j) p(*b.find(a[j]), j) = 1.0;
    for (Index i = 0; i < m; ++i)
      perm_diff = std::max(perm_diff, (p * va.tuple[i] * p.transpose() - vb.tuple[i]).cwiseAbs().maxCoeff());
    iso = std::max(iso, check_sphere_conditions(va.tuple, 1, va.interior).isometry_residual);
  }
  return {perm_diff == 0.0 && iso <= 1e-15, fmt("permutation mismatch %.1e, interior isometry residual %.1e", perm_diff, iso)};
}

Outcome invariance_suite() {
  int ok = 0;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto inst = random_planted(Rng::mix(kDefaultSeed, 9000 + i));
    Rng rng(Rng::mix(kDefaultSeed, 9500 + i));
    const auto s = conjugate(inst.tuple, random_conjugator(rng, inst.dim(), 20.0));
    const auto a = v_semigroup_invariant(inst.tuple);
    const auto b = v_semigroup_invariant(s);
    if (a.k == b.k && a.multiplicities == b.multiplicities) ++ok;
  }
  cli::JobConfig c;
  c.command = "selftest";
  c.count = 10;
  c.policy.seed = 31337;
  const auto r1 = cli::render(cli::run_job(c).report, cli::Format::json);
  const auto r2 = cli::render(cli::run_job(c).report, cli::Format::json);
  const bool same = r1 == r2;
  return {ok == 30 && same, fmt("%.0f/30 conjugation-invariant, reports identical: ", ok) + (same ? "yes" : "no")};
}

}  // namespace
}  // namespace sidecomp

int main() {
  using namespace sidecomp;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"planted recovery", planted_recovery},
      {"inflation commutant identity", inflation_identity},
      {"brute-force oracle agreement", oracle_equivalence},
      {"similarity verdicts and witnesses", similarity_criterion},
      {"Drury-Arveson identities", drury_arveson_identities},
      {"joint eigenvector residual", joint_eigenvector_residual},
      {"weighted Bergman basis norms", bergman_norms},
      {"spherical shift enumeration orders", spherical_shift_orders},
      {"invariance and determinism", invariance_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu: %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
