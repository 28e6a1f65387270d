#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sidecomp/numeric.hpp"
#include "sidecomp/rkhs.hpp"
#include "sidecomp/tuple_core.hpp"

namespace sidecomp::io {

using json = nlohmann::json;

/// Row-major array of rows, each entry [re, im].
json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const json& j, const std::string& what);

/// {"m": int, "d": int, "matrices": [matrix, ...]}
json tuple_to_json(const OperatorTuple& t);
OperatorTuple tuple_from_json(const json& j);

json complex_to_json(Complex z);

/// Parses a file, turning parse failures into InputError.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

struct KernelRequest {
  Index m = 1;
  Index dmax = 1;
  /// drury_arveson | bergman | hardy | custom | spherical_shift
  std::string preset;
  double k = 0.0;
  std::map<MultiIndex, double> custom_fhat;
  GridOrder order = GridOrder::graded_lex;
  /// Points w for joint eigenvectors, each of length m.
  std::vector<std::vector<Complex>> points;
  /// Largest power checked in the hypercontraction test.
  Index hypercontraction = 2;

  /// The diagonal kernel behind the request; spherical_shift has none.
  std::optional<DiagonalKernelSpec> kernel() const;
};

KernelRequest kernel_request_from_json(const json& j);

std::string order_name(GridOrder o);

}  // namespace sidecomp::io
