#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "brute_force_si.hpp"
#include "io.hpp"
#include "sidecomp/commutant.hpp"
#include "sidecomp/decomposition.hpp"
#include "sidecomp/errors.hpp"
#include "sidecomp/k_invariant.hpp"
#include "sidecomp/planted.hpp"
#include "sidecomp/rkhs.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp::cli {

using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Checks {
  json list = json::array();
  bool violated = false;
  std::vector<std::string> failed;
  std::string note;  // extra context for the stderr summary, e.g. failing seeds

  // Asserted checks decide the exit code; observations are only reported.
  void assert_that(const std::string& name, bool pass, json detail = nullptr) {
    add(name, pass, true, std::move(detail));
    if (!pass) {
      violated = true;
      failed.push_back(name);
    }
  }
  void observe(const std::string& name, bool pass, json detail = nullptr) { add(name, pass, false, std::move(detail)); }

 private:
  void add(const std::string& name, bool pass, bool asserted, json detail) {
    json c = {{"name", name}, {"pass", pass}, {"asserted", asserted}};
    if (!detail.is_null()) c["detail"] = std::move(detail);
    list.push_back(std::move(c));
  }
};

json policy_json(const NumericPolicy& p) {
  return {{"commute_tol", p.commute_tol}, {"idem_tol", p.idem_tol},       {"kernel_tol", p.kernel_tol},
          {"inv_tol", p.inv_tol},         {"rank_rel", p.rank_rel},       {"radical_rel", p.radical_rel},
          {"cluster_rel", p.cluster_rel}, {"size_cap", p.size_cap}};
}

json header(const JobConfig& c) {
  json inputs = json::array();
  if (!c.input.empty()) inputs.push_back(c.input);
  if (!c.input2.empty()) inputs.push_back(c.input2);
  return {{"tool", "sidecomp"},         {"version", kVersion}, {"command", c.command},
          {"seed", c.policy.seed},      {"policy", policy_json(c.policy)}, {"inputs", std::move(inputs)}};
}

// Parts below 1e-12 times the spectral radius are rounding and print as 0.
json spectrum_json(const Matrix& a) {
  const auto ev = linalg::sorted_eigenvalues(a);
  double radius = 0.0;
  for (const auto& z : ev) radius = std::max(radius, std::abs(z));
  const double floor = 1e-12 * std::max(1.0, radius);
  json out = json::array();
  for (auto z : ev) {
    if (std::abs(z.real()) < floor) z.real(0.0);
    if (std::abs(z.imag()) < floor) z.imag(0.0);
    out.push_back(io::complex_to_json(z));
  }
  return out;
}

json invariant_json(const SimilarityInvariant& inv) {
  json classes = json::array();
  for (std::size_t i = 0; i < inv.representatives.size(); ++i) {
    const auto& rep = inv.representatives[i];
    classes.push_back({{"multiplicity", inv.multiplicities[i]},
                       {"block_dim", rep.dim()},
                       {"spectrum", spectrum_json(rep[0])}});
  }
  return {{"k", inv.k}, {"multiplicities", inv.multiplicities}, {"classes", std::move(classes)}};
}

OperatorTuple load_commuting_tuple(const std::string& path, const NumericPolicy& policy) {
  if (path.empty()) throw InputError("missing --input");
  auto t = io::tuple_from_json(io::read_json_file(path));
  const auto rep = validate_commuting(t, policy.commute_tol);
  if (!rep.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", rep.max_scaled);
    throw InputError(path + ": matrices do not commute (scaled commutator " + buf + ")");
  }
  return t;
}

json cmd_decompose(const JobConfig& c, Checks& checks) {
  const auto t = load_commuting_tuple(c.input, c.policy);
  const auto a = joint_commutant(t, c.policy);
  const auto rad = radical(a, c.policy);
  const auto dec = unit_si_decomposition(t, c.policy);
  const auto res = check_unit_decomposition(dec, c.policy, true);
  const auto local = scaled_for(t, c.policy);

  json blocks = json::array();
  for (Index i = 0; i < dec.size(); ++i) {
    const Matrix& p = dec.idempotents[static_cast<std::size_t>(i)];
    const auto r = restrict(t, p, local);
    const bool si = is_strongly_irreducible(r.tuple, local);
    blocks.push_back({{"index", i},
                      {"block", dec.block[static_cast<std::size_t>(i)]},
                      {"rank", r.basis.cols()},
                      {"strongly_irreducible", si},
                      {"restriction_spectrum", spectrum_json(r.tuple[0])},
                      {"idempotent", io::matrix_to_json(p)}});
  }
  json result = {{"dim", t.dim()},
                 {"arity", t.arity()},
                 {"commutant_dim", a.algebra_dim()},
                 {"radical_dim", rad.dim()},
                 {"radical_rank_ambiguous", rad.ambiguous},
                 {"idempotent_count", dec.size()},
                 {"idempotents", std::move(blocks)},
                 {"residuals",
                  {{"max_commutator", res.max_commutator},
                   {"max_idempotent", res.max_idempotent},
                   {"max_annihilation", res.max_annihilation},
                   {"sum_residual", res.sum_residual}}}};
  checks.assert_that("unit decomposition invariants", res.pass,
                     {{"sum_residual", res.sum_residual}, {"max_annihilation", res.max_annihilation}});
  checks.assert_that("every block strongly irreducible", res.blocks_si);

  if (c.witness) {
    // A second decomposition from an independent draw must be similar to the
    // first one block for block.
    NumericPolicy other = c.policy;
    other.seed = Rng::mix(c.policy.seed, 1);
    const auto dec2 = unit_si_decomposition(t, other);
    const auto eq = decompositions_equivalent(t, dec, dec2, c.policy);
    json w = {{"reason", eq.reason}};
    if (eq.equivalence) {
      w["permutation"] = eq.equivalence->permutation;
      w["conjugator"] = io::matrix_to_json(eq.equivalence->conjugator);
      w["residual"] = eq.equivalence->residual;
    }
    result["uniqueness_witness"] = std::move(w);
    checks.assert_that("independent decomposition is similar", eq.equivalence.has_value() &&
                                                                   eq.equivalence->residual <= 1e-6);
  }
  return result;
}

json cmd_invariant(const JobConfig& c, Checks& checks) {
  const auto t = load_commuting_tuple(c.input, c.policy);
  const auto inv = v_semigroup_invariant(t, c.policy);
  const auto k0 = k0_descriptor(inv);
  Index total = 0;
  for (std::size_t i = 0; i < inv.representatives.size(); ++i)
    total += inv.multiplicities[i] * inv.representatives[i].dim();
  checks.assert_that("block dimensions account for d", total == t.dim(), {{"sum", total}, {"d", t.dim()}});
  json result = invariant_json(inv);
  result["dim"] = t.dim();
  result["k0"] = {{"rank", k0.rank}, {"order_unit", k0.order_unit}};
  return result;
}

json cmd_similar(const JobConfig& c, Checks& checks) {
  if (c.input2.empty()) throw InputError("similar needs --input2");
  const auto t = load_commuting_tuple(c.input, c.policy);
  const auto s = load_commuting_tuple(c.input2, c.policy);
  if (t.arity() != s.arity()) throw InputError("tuples have different arity");
  const auto v = similar(t, s, c.policy, c.witness);
  json result = {{"similar", v.similar},
                 {"reason", v.reason},
                 {"invariant_lhs", invariant_json(v.invariant_lhs)},
                 {"invariant_rhs", invariant_json(v.invariant_rhs)},
                 {"witness", v.witness ? io::matrix_to_json(*v.witness) : json(nullptr)},
                 {"residual", v.residual}};
  if (v.witness) checks.assert_that("witness conjugates T onto S", v.residual <= 1e-6, {{"residual", v.residual}});
  return result;
}

json emitted_tuple(const OperatorTuple& t, const TruncationGrid& grid, const std::string& mode) {
  json j = io::tuple_to_json(t);
  json alphas = json::array();
  for (const auto& a : grid.alphas()) alphas.push_back(a);
  j["basis"] = {{"order", io::order_name(grid.order())}, {"alphas", std::move(alphas)}};
  j["mode"] = mode;
  return j;
}

json sphere_json(const SphereReport& r) {
  return {{"row_contraction", r.row_contraction},
          {"spherical_isometry", r.spherical_isometry},
          {"spherical_unitary", r.spherical_unitary},
          {"hypercontraction", r.hypercontraction},
          {"isometry_residual", r.isometry_residual},
          {"min_defect_eigenvalue", r.min_defect_eig}};
}

json model_json(const ModelReport& r) {
  return {{"projection_residual", r.projection_residual}, {"projection", r.projection},
          {"compatible_dim", r.compatible_dim},           {"batch", r.batch},
          {"max_solve_residual", r.max_solve_residual},   {"solvable", r.solvable},
          {"conclusion", r.conclusion}};
}

// Permutation unitary P with P e_alpha = e'_alpha between two enumerations.
Matrix permutation_between(const TruncationGrid& from, const TruncationGrid& to) {
  Matrix p = Matrix::Zero(to.size(), from.size());
  for (Index j = 0; j < from.size(); ++j) p(*to.find(from[j]), j) = 1.0;
  return p;
}

json cmd_rkhs(const JobConfig& c, Checks& checks) {
  if (c.input.empty()) throw InputError("missing --input");
  const auto req = io::kernel_request_from_json(io::read_json_file(c.input));
  const TruncationGrid grid(req.m, req.dmax, req.order);
  json result = {{"preset", req.preset},
                 {"m", req.m},
                 {"dmax", req.dmax},
                 {"grid", {{"order", io::order_name(grid.order())}, {"size", grid.size()}}}};
  const auto interior = grid.interior();

  if (req.preset == "spherical_shift") {
    const auto sh = spherical_shift(grid);
    const auto sphere = check_sphere_conditions(sh.tuple, req.hypercontraction, sh.interior);
    result["sphere"] = sphere_json(sphere);
    checks.assert_that("spherical shift is an isometry on the interior", sphere.spherical_isometry,
                       {{"residual", sphere.isometry_residual}});
    const TruncationGrid other(req.m, req.dmax,
                               req.order == GridOrder::graded_lex ? GridOrder::graded_colex : GridOrder::graded_lex);
    const auto sh2 = spherical_shift(other);
    const Matrix p = permutation_between(grid, other);
    double diff = 0.0;
    for (Index i = 0; i < req.m; ++i)
      diff = std::max(diff, (p * sh.tuple[i] * p.transpose() - sh2.tuple[i]).cwiseAbs().maxCoeff());
    checks.assert_that("other enumeration order is a permutation conjugate", diff == 0.0, {{"max_entry_difference", diff}});
    const auto model = check_model_hypotheses(sh.tuple, c.policy, interior);
    result["model"] = model_json(model);
    checks.observe("model hypotheses", model.projection && model.solvable);
    result["emitted"] = c.emit.empty() ? json(nullptr) : json(c.emit);
    if (!c.emit.empty()) io::write_json_file(c.emit, emitted_tuple(sh.tuple, grid, "forward"));
    return result;
  }

  const auto spec = *req.kernel();
  const bool da = spec.preset() == KernelPreset::drury_arveson;
  const auto forward = truncated_tuple(spec, grid, ShiftMode::forward);
  const auto adjoint = truncated_tuple(spec, grid, ShiftMode::adjoint);

  // weights read back from the matrix entries
  double weight_err = 0.0;
  for (Index i = 0; i < req.m; ++i)
    for (Index j = 0; j < grid.size(); ++j) {
      MultiIndex up = grid[j];
      if (degree(up) >= grid.max_degree()) continue;
      ++up[static_cast<std::size_t>(i)];
      const double w = std::abs(forward[i](*grid.find(up), j));
      const double ratio = std::exp(spec.log_fhat(grid[j]) - spec.log_fhat(up));
      weight_err = std::max(weight_err, std::abs(w * w / ratio - 1.0));
    }
  checks.assert_that("weights round trip", weight_err <= 1e-14, {{"max_relative_error", weight_err}});

  const RealVector built = constructed_monomial_norms(forward, grid);
  json table = json::array();
  double norm_err = 0.0;
  const double f0 = spec.log_fhat(MultiIndex(static_cast<std::size_t>(req.m), 0));
  for (Index j = 0; j < grid.size(); ++j) {
    const double closed = std::exp(f0 - spec.log_fhat(grid[j]));
    const double rel = std::abs(built(j) - closed) / closed;
    norm_err = std::max(norm_err, rel);
    table.push_back({{"alpha", grid[j]}, {"constructed", built(j)}, {"closed_form", closed}, {"relative_error", rel}});
  }
  result["basis_norms"] = std::move(table);
  checks.assert_that("monomial norms match 1/fhat", norm_err <= 1e-12, {{"max_relative_error", norm_err}});

  const auto defect = defect_operator(adjoint);
  result["defect"] = {{"vacuum_residual", defect.vacuum_residual},
                      {"projection_residual", defect.projection_residual},
                      {"rank", defect.rank}};
  if (da)
    checks.assert_that("defect equals the vacuum projection", defect.vacuum_residual <= 1e-12,
                       {{"residual", defect.vacuum_residual}});
  else
    checks.observe("defect equals the vacuum projection", defect.vacuum_residual <= 1e-12,
                   {{"residual", defect.vacuum_residual}});

  const auto ps = p_sequence(adjoint, grid, grid.max_degree());
  result["p_sequence"] = {{"min_eigenvalues", ps.min_eig},
                          {"min_gap_eigenvalues", ps.min_gap_eig},
                          {"vanishing", ps.vanishing}};
  checks.assert_that("P_n positive semidefinite", ps.psd);
  checks.assert_that("P_n vanishes below degree n", ps.vanishing == 0.0, {{"max_entry", ps.vanishing}});
  if (da)
    checks.assert_that("P_n decreasing", ps.decreasing);
  else
    checks.observe("P_n decreasing", ps.decreasing);

  const auto sphere = check_sphere_conditions(adjoint, req.hypercontraction);
  result["sphere"] = sphere_json(sphere);
  if (da) checks.assert_that("backward shift is a row contraction", sphere.row_contraction);

  const auto model = check_model_hypotheses(adjoint, c.policy, interior);
  result["model"] = model_json(model);
  if (da)
    checks.assert_that("model hypotheses", model.projection && model.solvable,
                       {{"projection_residual", model.projection_residual},
                        {"max_solve_residual", model.max_solve_residual}});
  else
    checks.observe("model hypotheses", model.projection && model.solvable);

  json eig = json::array();
  for (const auto& w : req.points) {
    const auto je = joint_eigenvector(spec, grid, w);
    json pt = json::array();
    for (const auto& z : w) pt.push_back(io::complex_to_json(z));
    eig.push_back({{"point", std::move(pt)}, {"residual", je.residual}, {"tail_bound", je.tail_bound}});
  }
  result["joint_eigenvectors"] = std::move(eig);
  result["emitted"] = c.emit.empty() ? json(nullptr) : json(c.emit);
  if (!c.emit.empty()) io::write_json_file(c.emit, emitted_tuple(adjoint, grid, "adjoint"));
  return result;
}

json cmd_selftest(const JobConfig& c, Checks& checks) {
  json failures = json::array();
  Index recovered = 0;
  for (Index i = 0; i < c.count; ++i) {
    const std::uint64_t seed = Rng::mix(c.policy.seed, static_cast<std::uint64_t>(i));
    const auto inst = random_planted(seed);
    json expected = {{"k", inst.k()}, {"multiplicities", inst.multiplicities()}};
    try {
      const auto inv = v_semigroup_invariant(inst.tuple, c.policy);
      if (inv.k == inst.k() && inv.multiplicities == inst.multiplicities()) {
        ++recovered;
        continue;
      }
      failures.push_back({{"index", i}, {"seed", seed}, {"expected", expected},
                          {"got", {{"k", inv.k}, {"multiplicities", inv.multiplicities}}}});
    } catch (const std::exception& e) {
      failures.push_back({{"index", i}, {"seed", seed}, {"expected", expected}, {"error", e.what()}});
    }
  }
  if (!failures.empty()) {
    checks.note = "failing seeds:";
    for (const auto& f : failures) checks.note += " " + std::to_string(f["seed"].get<std::uint64_t>());
  }
  checks.assert_that("planted invariants recovered", recovered == c.count,
                     {{"recovered", recovered}, {"count", c.count}});

  json corpus = json::array();
  Index agree = 0;
  const auto tuples = oracle::small_corpus();
  for (const auto& nt : tuples) {
    const auto search = oracle::search_idempotent(nt.tuple, c.policy.seed);
    bool si = false;
    std::string error;
    try {
      si = is_strongly_irreducible(nt.tuple, c.policy);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const bool match = error.empty() && si == !search.found;
    if (match) ++agree;
    json entry = {{"name", nt.name}, {"oracle_si", !search.found}, {"si", si}, {"agree", match}};
    if (!error.empty()) entry["error"] = error;
    corpus.push_back(std::move(entry));
  }
  checks.assert_that("oracle agrees on the small corpus", agree == static_cast<Index>(tuples.size()),
                     {{"agree", agree}, {"count", tuples.size()}});
  return {{"planted", {{"count", c.count}, {"recovered", recovered}, {"failures", std::move(failures)}}},
          {"oracle", {{"count", tuples.size()}, {"agree", agree}, {"corpus", std::move(corpus)}}}};
}

// ---- table rendering ----

std::string fmt_number(const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
  return buf;
}

bool is_complex(const json& v) { return v.is_array() && v.size() == 2 && v[0].is_number_float() && v[1].is_number_float(); }

bool is_matrix(const json& v) {
  return v.is_array() && !v.empty() && v[0].is_array() && !v[0].empty() && is_complex(v[0][0]);
}

std::string fmt_scalar(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number()) return fmt_number(v);
  if (v.is_string()) return v.get<std::string>();
  if (is_complex(v)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", v[0].get<double>(), v[1].get<double>());
    return buf;
  }
  if (is_matrix(v)) return "<" + std::to_string(v.size()) + "x" + std::to_string(v[0].size()) + " matrix>";
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_scalar(v[i]);
    return s + "]";
  }
  return v.dump();
}

bool flat_object(const json& v) {
  if (!v.is_object()) return false;
  for (auto it = v.begin(); it != v.end(); ++it)
    if (it.value().is_object() || (it.value().is_array() && is_matrix(it.value()))) return false;
  return true;
}

// An array of flat objects sharing their keys renders as a table.
bool tabular(const json& v) {
  if (!v.is_array() || v.empty() || !flat_object(v[0])) return false;
  for (const auto& row : v) {
    if (!flat_object(row) || row.size() != v[0].size()) return false;
    for (auto it = v[0].begin(); it != v[0].end(); ++it)
      if (!row.contains(it.key())) return false;
  }
  return true;
}

void render_rows(std::ostringstream& out, const json& rows, const std::string& indent) {
  std::vector<std::string> keys;
  for (auto it = rows[0].begin(); it != rows[0].end(); ++it) keys.push_back(it.key());
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  for (const auto& k : keys) width.push_back(k.size());
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < keys.size(); ++c) {
      line.push_back(fmt_scalar(row[keys[c]]));
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  auto emit = [&](const std::vector<std::string>& line) {
    out << indent;
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << line[c];
      if (c + 1 < line.size()) out << std::string(width[c] - line[c].size() + 2, ' ');
    }
    out << '\n';
  };
  emit(keys);
  for (const auto& line : cells) emit(line);
}

void render_value(std::ostringstream& out, const std::string& key, const json& v, const std::string& indent) {
  if (v.is_object()) {
    out << indent << key << ":\n";
    for (auto it = v.begin(); it != v.end(); ++it) render_value(out, it.key(), it.value(), indent + "  ");
  } else if (tabular(v)) {
    out << indent << key << ":\n";
    render_rows(out, v, indent + "  ");
  } else if (v.is_array() && !v.empty() && v[0].is_object()) {
    out << indent << key << ":\n";
    for (std::size_t i = 0; i < v.size(); ++i) render_value(out, "[" + std::to_string(i) + "]", v[i], indent + "  ");
  } else {
    out << indent << key << ": " << fmt_scalar(v) << '\n';
  }
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env_value) {
  if (flag) return *flag;
  if (env_value && *env_value) {
    const std::string s(env_value);
    if (s.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("SIDECOMP_SEED must be an unsigned integer, got \"" + s + "\"");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw InputError("SIDECOMP_SEED is out of range");
    }
  }
  return kDefaultSeed;
}

JobResult run_job(const JobConfig& config) {
  JobResult out;
  try {
    Checks checks;
    json result;
    if (config.command == "decompose") result = cmd_decompose(config, checks);
    else if (config.command == "invariant") result = cmd_invariant(config, checks);
    else if (config.command == "similar") result = cmd_similar(config, checks);
    else if (config.command == "rkhs") result = cmd_rkhs(config, checks);
    else if (config.command == "selftest") result = cmd_selftest(config, checks);
    else throw InputError("unknown command \"" + config.command + "\"");
    out.report = header(config);
    out.report["result"] = std::move(result);
    out.report["checks"] = std::move(checks.list);
    out.report["status"] = checks.violated ? "property violation" : "ok";
    out.exit_code = checks.violated ? kViolation : kOk;
    if (checks.violated) {
      for (std::size_t i = 0; i < checks.failed.size(); ++i) out.error += (i ? ", " : "") + checks.failed[i];
      if (!checks.note.empty()) out.error += "; " + checks.note;
    }
  } catch (const InputError& e) {
    out.exit_code = kInputError;
    out.error = e.what();
  } catch (const NumericalDegeneracy& e) {
    out.exit_code = kDegenerate;
    out.error = e.what();
  } catch (const PropertyViolation& e) {
    out.exit_code = kViolation;
    out.error = e.what();
  } catch (const json::exception& e) {
    out.exit_code = kInputError;
    out.error = std::string("malformed input: ") + e.what();
  }
  return out;
}

std::string render(const json& report, Format format) {
  if (format == Format::json) return report.dump(2) + "\n";
  std::ostringstream out;
  out << "sidecomp " << fmt_scalar(report["version"]) << "  command: " << fmt_scalar(report["command"]) << '\n';
  out << "seed: " << fmt_scalar(report["seed"]) << '\n';
  render_value(out, "policy", report["policy"], "");
  render_value(out, "inputs", report["inputs"], "");
  render_value(out, "result", report["result"], "");
  out << "checks:\n";
  for (const auto& c : report["checks"]) {
    out << "  " << (c["pass"].get<bool>() ? "PASS" : "FAIL") << (c["asserted"].get<bool>() ? "  " : "* ")
        << c["name"].get<std::string>();
    if (c.contains("detail")) {
      for (auto it = c["detail"].begin(); it != c["detail"].end(); ++it)
        out << "  " << it.key() << "=" << fmt_scalar(it.value());
    }
    out << '\n';
  }
  out << "status: " << fmt_scalar(report["status"]) << '\n';
  return out.str();
}

}  // namespace sidecomp::cli
