#include "io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sidecomp/errors.hpp"

namespace sidecomp::io {

namespace {

Complex complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError(what + ": complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Index positive_int(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw InputError(what + ": missing integer \"" + key + "\"");
  const auto v = j[key].get<long long>();
  if (v < 0) throw InputError(what + ": \"" + key + "\" must be nonnegative");
  return static_cast<Index>(v);
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(complex_to_json(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a nonempty array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array()) throw InputError(what + ": rows must be arrays");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix a(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw InputError(what + ": ragged rows");
    for (Index c = 0; c < cols; ++c) a(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], what);
  }
  return a;
}

json tuple_to_json(const OperatorTuple& t) {
  json mats = json::array();
  for (const auto& a : t.matrices()) mats.push_back(matrix_to_json(a));
  return {{"m", t.arity()}, {"d", t.dim()}, {"matrices", std::move(mats)}};
}

OperatorTuple tuple_from_json(const json& j) {
  if (!j.is_object()) throw InputError("tuple: expected a JSON object");
  const Index m = positive_int(j, "m", "tuple");
  const Index d = positive_int(j, "d", "tuple");
  if (m < 1 || d < 1) throw InputError("tuple: m and d must be at least 1");
  if (!j.contains("matrices") || !j["matrices"].is_array()) throw InputError("tuple: missing \"matrices\" array");
  const auto& mats = j["matrices"];
  if (static_cast<Index>(mats.size()) != m)
    throw InputError("tuple: \"m\" is " + std::to_string(m) + " but " + std::to_string(mats.size()) +
                     " matrices are given");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    Matrix a = matrix_from_json(mats[i], "tuple matrix " + std::to_string(i + 1));
    if (a.rows() != d || a.cols() != d)
      throw InputError("tuple matrix " + std::to_string(i + 1) + " is not " + std::to_string(d) + "x" +
                       std::to_string(d));
    out.push_back(std::move(a));
  }
  return OperatorTuple(std::move(out));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw InputError(path + ": malformed JSON (" + e.what() + ")");
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string order_name(GridOrder o) { return o == GridOrder::graded_lex ? "graded_lex" : "graded_colex"; }

std::optional<DiagonalKernelSpec> KernelRequest::kernel() const {
  if (preset == "drury_arveson") return DiagonalKernelSpec::drury_arveson(m);
  if (preset == "bergman") return DiagonalKernelSpec::bergman(m, k);
  if (preset == "hardy") return DiagonalKernelSpec::hardy_like(m);
  if (preset == "custom") return DiagonalKernelSpec::custom(m, custom_fhat);
  return std::nullopt;
}

KernelRequest kernel_request_from_json(const json& j) {
  if (!j.is_object()) throw InputError("kernel spec: expected a JSON object");
  KernelRequest r;
  r.m = positive_int(j, "m", "kernel spec");
  r.dmax = positive_int(j, "dmax", "kernel spec");
  if (r.m < 1) throw InputError("kernel spec: m must be at least 1");
  if (!j.contains("preset") || !j["preset"].is_string()) throw InputError("kernel spec: missing \"preset\"");
  r.preset = j["preset"].get<std::string>();
  static const char* known[] = {"drury_arveson", "bergman", "hardy", "custom", "spherical_shift"};
  if (std::find(std::begin(known), std::end(known), r.preset) == std::end(known))
    throw InputError("kernel spec: unknown preset \"" + r.preset + "\"");
  if (r.preset == "bergman") {
    if (!j.contains("k") || !j["k"].is_number()) throw InputError("kernel spec: bergman needs a numeric \"k\"");
    r.k = j["k"].get<double>();
    if (!(r.k > 0.0)) throw InputError("kernel spec: bergman parameter k must be positive");
  }
  if (j.contains("custom_fhat")) {
    const auto& table = j["custom_fhat"];
    if (!table.is_array()) throw InputError("kernel spec: \"custom_fhat\" must be an array");
    for (const auto& entry : table) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() || !entry[1].is_number())
        throw InputError("kernel spec: custom_fhat entries are [[alpha...], value]");
      MultiIndex alpha;
      for (const auto& v : entry[0]) {
        if (!v.is_number_integer() || v.get<int>() < 0)
          throw InputError("kernel spec: multi-index entries must be nonnegative integers");
        alpha.push_back(v.get<int>());
      }
      if (static_cast<Index>(alpha.size()) != r.m) throw InputError("kernel spec: custom_fhat multi-index has wrong length");
      const double value = entry[1].get<double>();
      if (!(value > 0.0)) throw InputError("kernel spec: custom_fhat values must be positive");
      r.custom_fhat[alpha] = value;
    }
  }
  if (r.preset == "custom" && r.custom_fhat.empty()) throw InputError("kernel spec: custom preset needs custom_fhat");
  if (j.contains("order")) {
    const auto o = j["order"].get<std::string>();
    if (o == "graded_lex") r.order = GridOrder::graded_lex;
    else if (o == "graded_colex") r.order = GridOrder::graded_colex;
    else throw InputError("kernel spec: unknown order \"" + o + "\"");
  }
  if (j.contains("points")) {
    for (const auto& p : j["points"]) {
      if (!p.is_array() || static_cast<Index>(p.size()) != r.m) throw InputError("kernel spec: each point needs m coordinates");
      std::vector<Complex> w;
      for (const auto& c : p) w.push_back(complex_from_json(c, "kernel spec point"));
      r.points.push_back(std::move(w));
    }
  }
  if (j.contains("hypercontraction")) r.hypercontraction = positive_int(j, "hypercontraction", "kernel spec");
  return r;
}

}  // namespace sidecomp::io
