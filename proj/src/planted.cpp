#include "sidecomp/planted.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sidecomp/errors.hpp"

namespace sidecomp {

namespace {

const std::array<Complex, 5> kEigenvalues = {Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(-1.0, 0.0),
                                             Complex(0.0, 1.0), Complex(2.0, 0.0)};

// p_2(x) = x^2 + x / 2, p_3(x) = x^3 - x
Matrix companion(const Matrix& j, Index which) {
  const Matrix j2 = j * j;
  if (which == 1) return j2 + 0.5 * j;
  return j2 * j - j;
}

Matrix haar_unitary(Rng& rng, Index d) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

}  // namespace

OperatorTuple block_tuple(const BlockSpec& spec, Index arity) {
  if (spec.r < 1) throw InputError("block size must be positive");
  if (arity < 1 || arity > 3) throw InputError("planted blocks support arity 1 to 3");
  const Matrix j = jordan_block(spec.r, spec.lambda);
  std::vector<Matrix> mats{j};
  for (Index i = 1; i < arity; ++i) mats.push_back(companion(j, i));
  return OperatorTuple(std::move(mats));
}

std::vector<Index> PlantedInstance::multiplicities() const {
  std::vector<Index> out;
  for (const auto& c : classes) out.push_back(c.multiplicity);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Matrix random_conjugator(Rng& rng, Index d, double condition) {
  if (!(condition >= 1.0)) throw InputError("condition bound must be at least 1");
  const Matrix u = haar_unitary(rng, d);
  const Matrix v = haar_unitary(rng, d);
  RealVector s(d);
  const double span = std::log(condition);
  for (Index i = 0; i < d; ++i) s(i) = d == 1 ? 1.0 : std::exp(span * static_cast<double>(i) / static_cast<double>(d - 1));
  return u * s.cast<Complex>().asDiagonal() * v.adjoint();
}

PlantedInstance make_planted(const std::vector<PlantedClass>& classes, Index arity, Rng& rng, double condition) {
  if (classes.empty()) throw InputError("planted instance needs at least one class");
  PlantedInstance out;
  out.classes = classes;
  std::vector<std::vector<Matrix>> parts(static_cast<std::size_t>(arity));
  for (const auto& c : classes) {
    const auto blk = block_tuple(c.block, arity);
    for (Index n = 0; n < c.multiplicity; ++n)
      for (Index i = 0; i < arity; ++i) parts[static_cast<std::size_t>(i)].push_back(blk[i]);
  }
  std::vector<Matrix> mats;
  for (const auto& p : parts) mats.push_back(block_diagonal(p));
  out.block_form = OperatorTuple(std::move(mats));
  out.conjugator = random_conjugator(rng, out.block_form.dim(), condition);
  const RealVector sv = linalg::singular_values(out.conjugator);
  out.condition = sv(0) / sv(sv.size() - 1);
  out.tuple = conjugate(out.block_form, out.conjugator);
  return out;
}

PlantedInstance random_planted(std::uint64_t seed, const PlantedOptions& options) {
  Rng rng(seed);
  for (;;) {
    const Index k = 1 + rng.uniform_index(options.max_classes);
    std::vector<PlantedClass> classes;
    Index d = 0;
    while (static_cast<Index>(classes.size()) < k) {
      PlantedClass c;
      c.block.r = 1 + rng.uniform_index(options.max_block);
      c.block.lambda = kEigenvalues[static_cast<std::size_t>(rng.uniform_index(kEigenvalues.size()))];
      c.multiplicity = 1 + rng.uniform_index(options.max_multiplicity);
      const bool repeat = std::any_of(classes.begin(), classes.end(),
                                      [&](const PlantedClass& o) { return o.block == c.block; });
      if (repeat) continue;
      classes.push_back(c);
      d += c.block.r * c.multiplicity;
    }
    if (d > options.max_dim) continue;
    const Index arity = 1 + rng.uniform_index(options.max_arity);
    const double cond = std::exp(rng.uniform(0.0, std::log(options.max_condition)));
    auto inst = make_planted(classes, arity, rng, cond);
    inst.seed = seed;
    return inst;
  }
}

OperatorTuple random_commuting_tuple(std::uint64_t seed, Index max_dim, Index max_arity) {
  Rng rng(seed);
  const Index d = 1 + rng.uniform_index(max_dim);
  const Index m = 1 + rng.uniform_index(max_arity);
  std::vector<std::vector<Matrix>> parts(static_cast<std::size_t>(m));
  Index used = 0;
  while (used < d) {
    const Index r = 1 + rng.uniform_index(std::min<Index>(3, d - used));
    const Complex lambda = kEigenvalues[static_cast<std::size_t>(rng.uniform_index(3))];
    const Matrix j = jordan_block(r, lambda);
    for (Index i = 0; i < m; ++i) {
      // each entry is a polynomial in j with small integer coefficients
      Matrix p = Matrix::Zero(r, r);
      Matrix power = linalg::identity(r);
      for (Index deg = 0; deg < r; ++deg) {
        p += static_cast<double>(rng.uniform_index(3)) * power;
        power = power * j;
      }
      if (i == 0) p = j;
      parts[static_cast<std::size_t>(i)].push_back(p);
    }
    used += r;
  }
  std::vector<Matrix> mats;
  for (const auto& p : parts) mats.push_back(block_diagonal(p));
  const Matrix x = random_conjugator(rng, d, 10.0);
  return conjugate(OperatorTuple(std::move(mats)), x);
}

}  // namespace sidecomp
