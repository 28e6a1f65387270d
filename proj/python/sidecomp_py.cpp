#include <cstdio>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "sidecomp/commutant.hpp"
#include "sidecomp/decomposition.hpp"
#include "sidecomp/errors.hpp"
#include "sidecomp/k_invariant.hpp"
#include "sidecomp/planted.hpp"
#include "sidecomp/rkhs.hpp"

namespace py = pybind11;
using namespace sidecomp;

namespace {

NumericPolicy make_policy(std::uint64_t seed, std::optional<double> tol) {
  NumericPolicy p;
  p.seed = seed;
  if (tol) p.commute_tol = p.idem_tol = p.kernel_tol = p.inv_tol = *tol;
  return p;
}

OperatorTuple to_tuple(const std::vector<Matrix>& mats) { return OperatorTuple(mats); }

OperatorTuple to_commuting_tuple(const std::vector<Matrix>& mats, const NumericPolicy& policy) {
  OperatorTuple t(mats);
  const auto rep = validate_commuting(t, policy.commute_tol);
  if (!rep.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", rep.max_scaled);
    throw InputError(std::string("matrices do not commute (scaled commutator ") + buf + ")");
  }
  return t;
}

py::dict invariant_dict(const SimilarityInvariant& inv) {
  py::dict d;
  d["k"] = inv.k;
  d["multiplicities"] = inv.multiplicities;
  std::vector<std::vector<Matrix>> reps;
  for (const auto& r : inv.representatives) reps.push_back(r.matrices());
  d["representatives"] = reps;
  return d;
}

DiagonalKernelSpec kernel(const std::string& preset, Index m, double k) {
  if (preset == "drury_arveson") return DiagonalKernelSpec::drury_arveson(m);
  if (preset == "bergman") return DiagonalKernelSpec::bergman(m, k);
  if (preset == "hardy") return DiagonalKernelSpec::hardy_like(m);
  throw InputError("unknown kernel preset \"" + preset + "\"");
}

GridOrder grid_order(const std::string& order) {
  if (order == "graded_lex") return GridOrder::graded_lex;
  if (order == "graded_colex") return GridOrder::graded_colex;
  throw InputError("unknown order \"" + order + "\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Strongly irreducible decompositions and similarity invariants of commuting matrix tuples.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalDegeneracy>(m, "NumericalDegeneracy", PyExc_ArithmeticError);
  py::register_exception<PropertyViolation>(m, "PropertyViolation", PyExc_AssertionError);

  m.def(
      "validate_commuting",
      [](const std::vector<Matrix>& mats, double tol) {
        const auto r = validate_commuting(std::span<const Matrix>(mats), tol);
        py::dict d;
        d["pass"] = r.pass;
        d["max_commutator"] = r.max_commutator;
        d["max_scaled"] = r.max_scaled;
        return d;
      },
      py::arg("matrices"), py::arg("tol") = 1e-8);

  m.def(
      "joint_commutant",
      [](const std::vector<Matrix>& mats, std::uint64_t seed, std::optional<double> tol) {
        return joint_commutant(to_tuple(mats), make_policy(seed, tol)).basis;
      },
      py::arg("matrices"), py::arg("seed") = kDefaultSeed, py::arg("tol") = py::none(),
      "Frobenius-orthonormal basis of the joint commutant.");

  m.def(
      "inflation_check",
      [](const std::vector<Matrix>& mats, Index n) {
        const auto c = inflation_commutant_check(to_tuple(mats), n);
        return py::make_tuple(c.inflated_dim, c.base_dim, c.pass);
      },
      py::arg("matrices"), py::arg("n"), "(dim A'(T^(n)), dim A'(T), equality holds)");

  m.def(
      "is_strongly_irreducible",
      [](const std::vector<Matrix>& mats, std::uint64_t seed, std::optional<double> tol) {
        return is_strongly_irreducible(to_tuple(mats), make_policy(seed, tol));
      },
      py::arg("matrices"), py::arg("seed") = kDefaultSeed, py::arg("tol") = py::none());

  m.def(
      "decompose",
      [](const std::vector<Matrix>& mats, std::uint64_t seed, std::optional<double> tol) {
        const auto policy = make_policy(seed, tol);
        const auto dec = unit_si_decomposition(to_commuting_tuple(mats, policy), policy);
        const auto res = check_unit_decomposition(dec, policy);
        py::dict d;
        d["idempotents"] = dec.idempotents;
        d["block"] = dec.block;
        d["sum_residual"] = res.sum_residual;
        d["max_annihilation"] = res.max_annihilation;
        return d;
      },
      py::arg("matrices"), py::arg("seed") = kDefaultSeed, py::arg("tol") = py::none(),
      "Unit strongly irreducible decomposition: primitive idempotents and block labels.");

  m.def(
      "invariant",
      [](const std::vector<Matrix>& mats, std::uint64_t seed, std::optional<double> tol) {
        const auto policy = make_policy(seed, tol);
        return invariant_dict(v_semigroup_invariant(to_commuting_tuple(mats, policy), policy));
      },
      py::arg("matrices"), py::arg("seed") = kDefaultSeed, py::arg("tol") = py::none());

  m.def(
      "similar",
      [](const std::vector<Matrix>& a, const std::vector<Matrix>& b, bool witness, std::uint64_t seed,
         std::optional<double> tol) {
        const auto policy = make_policy(seed, tol);
        const auto v = similar(to_commuting_tuple(a, policy), to_commuting_tuple(b, policy), policy, witness);
        py::dict d;
        d["similar"] = v.similar;
        d["reason"] = v.reason;
        d["invariant_lhs"] = invariant_dict(v.invariant_lhs);
        d["invariant_rhs"] = invariant_dict(v.invariant_rhs);
        d["witness"] = v.witness ? py::cast(*v.witness) : py::none();
        d["residual"] = v.residual;
        return d;
      },
      py::arg("t"), py::arg("s"), py::arg("witness") = false, py::arg("seed") = kDefaultSeed,
      py::arg("tol") = py::none());

  m.def(
      "planted",
      [](std::uint64_t seed) {
        const auto inst = random_planted(seed);
        py::dict d;
        d["matrices"] = inst.tuple.matrices();
        d["k"] = inst.k();
        d["multiplicities"] = inst.multiplicities();
        d["condition"] = inst.condition;
        d["conjugator"] = inst.conjugator;
        return d;
      },
      py::arg("seed"), "Seeded tuple X (sum of Jordan-type blocks) X^{-1} with known invariant.");

  m.def(
      "grid",
      [](Index arity, Index dmax, const std::string& order) { return TruncationGrid(arity, dmax, grid_order(order)).alphas(); },
      py::arg("m"), py::arg("dmax"), py::arg("order") = "graded_lex");

  m.def(
      "truncated_tuple",
      [](const std::string& preset, Index arity, Index dmax, double k, bool adjoint) {
        const TruncationGrid g(arity, dmax);
        return truncated_tuple(kernel(preset, arity, k), g, adjoint ? ShiftMode::adjoint : ShiftMode::forward).matrices();
      },
      py::arg("preset"), py::arg("m"), py::arg("dmax"), py::arg("k") = 2.0, py::arg("adjoint") = true);

  m.def(
      "spherical_shift",
      [](Index arity, Index dmax, const std::string& order) {
        const auto s = spherical_shift(TruncationGrid(arity, dmax, grid_order(order)));
        return py::make_tuple(s.tuple.matrices(), s.interior);
      },
      py::arg("m"), py::arg("dmax"), py::arg("order") = "graded_lex");

  m.def(
      "joint_eigenvector",
      [](const std::string& preset, Index dmax, const std::vector<Complex>& w, double k) {
        const auto arity = static_cast<Index>(w.size());
        const auto je = joint_eigenvector(kernel(preset, arity, k), TruncationGrid(arity, dmax), w);
        py::dict d;
        d["vector"] = je.v;
        d["residual"] = je.residual;
        d["tail_bound"] = je.tail_bound;
        return d;
      },
      py::arg("preset"), py::arg("dmax"), py::arg("w"), py::arg("k") = 2.0);

  m.def(
      "defect",
      [](const std::vector<Matrix>& adjoint_tuple) {
        const auto r = defect_operator(to_tuple(adjoint_tuple));
        return py::make_tuple(r.defect, r.vacuum_residual, r.rank);
      },
      py::arg("matrices"));

  m.def(
      "run",
      [](const std::string& command, const std::string& input, const std::string& input2, std::uint64_t seed,
         bool witness, const std::string& format, Index count) {
        cli::JobConfig c;
        c.command = command;
        c.input = input;
        c.input2 = input2;
        c.policy.seed = seed;
        c.witness = witness;
        c.count = count;
        c.format = format == "table" ? cli::Format::table : cli::Format::json;
        const auto r = cli::run_job(c);
        const std::string text = r.report.is_null() ? r.error : cli::render(r.report, c.format);
        return py::make_tuple(r.exit_code, text);
      },
      py::arg("command"), py::arg("input") = "", py::arg("input2") = "", py::arg("seed") = kDefaultSeed,
      py::arg("witness") = false, py::arg("format") = "json", py::arg("count") = 100,
      "Runs a command line job in process; returns (exit code, report or error text).");
}
