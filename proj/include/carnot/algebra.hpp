#pragma once

#include "carnot/errors.hpp"
#include "carnot/rational.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

namespace carnot {

/// Point buffers on hot paths live on the stack; this caps the dimension.
inline constexpr int kMaxDimension = 64;

/// One structure constant, [e_i, e_j] has coefficient `c` along e_k.
/// Indices are 1-based as in the JSON format.
struct BracketEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  Rational c;
};

/// Raw, unvalidated description of a graded Lie algebra V_1 + ... + V_s.
struct GradedAlgebraSpec {
  std::string name;
  std::vector<int> layer_dims;
  std::vector<BracketEntry> brackets;
  /// When set, an entry (i, j, k, c) also implies (j, i, k, -c) unless the
  /// reverse entry is listed explicitly.
  bool implied_antisymmetry = true;
};

/// Nonzero structure constant in 0-based indices.
struct StructureConstant {
  int i, j, k;
  Rational c;
};

/// A graded Lie algebra whose data has been checked exactly: antisymmetry,
/// the grading [V_i, V_j] in V_{i+j}, and the Jacobi identity.
class ValidatedAlgebra {
 public:
  const std::string& name() const { return name_; }
  int dimension() const { return n_; }
  int step() const { return static_cast<int>(layer_dims_.size()); }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  /// degrees()[j] = k iff e_j lies in V_k.
  const std::vector<int>& degrees() const { return degrees_; }
  int degree(int j) const { return degrees_[static_cast<std::size_t>(j)]; }
  /// offsets()[k] = dim V_1 + ... + dim V_k, offsets()[0] = 0.
  const std::vector<int>& offsets() const { return offsets_; }
  int layer_begin(int layer) const { return offsets_[static_cast<std::size_t>(layer - 1)]; }
  int layer_end(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }
  const std::vector<StructureConstant>& structure_constants() const { return constants_; }
  const Rational& c(int i, int j, int k) const { return dense_[index(i, j, k)]; }
  /// Homogeneous dimension sum_k k dim V_k.
  int homogeneous_dimension() const {
    int q = 0;
    for (std::size_t k = 0; k < layer_dims_.size(); ++k) q += static_cast<int>(k + 1) * layer_dims_[k];
    return q;
  }

  /// Exact bracket of two coordinate vectors.
  template <class T>
  std::vector<T> bracket(const std::vector<T>& a, const std::vector<T>& b) const {
    std::vector<T> out(static_cast<std::size_t>(n_), T(0));
    for (const auto& sc : constants_) {
      if constexpr (std::is_same_v<T, Rational>) {
        out[static_cast<std::size_t>(sc.k)] += sc.c * a[static_cast<std::size_t>(sc.i)] * b[static_cast<std::size_t>(sc.j)];
      } else {
        out[static_cast<std::size_t>(sc.k)] += static_cast<T>(to_double(sc.c)) * a[static_cast<std::size_t>(sc.i)] *
                                               b[static_cast<std::size_t>(sc.j)];
      }
    }
    return out;
  }

  friend ValidatedAlgebra validate_algebra(const GradedAlgebraSpec& spec);

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(k);
  }

  std::string name_;
  int n_ = 0;
  std::vector<int> layer_dims_;
  std::vector<int> degrees_;
  std::vector<int> offsets_;
  std::vector<Rational> dense_;
  std::vector<StructureConstant> constants_;
};

/// Checks the definition exactly and returns the algebra handle.
///
/// Throws ConfigError for malformed dimensions or indices, and the
/// GroupValidationError subclasses for violated algebraic invariants.
inline ValidatedAlgebra validate_algebra(const GradedAlgebraSpec& spec) {
  if (spec.layer_dims.empty()) throw ConfigError("algebra needs at least one layer");
  for (int d : spec.layer_dims)
    if (d <= 0) throw ConfigError("layer dimensions must be positive");

  ValidatedAlgebra a;
  a.name_ = spec.name;
  a.layer_dims_ = spec.layer_dims;
  a.n_ = std::accumulate(spec.layer_dims.begin(), spec.layer_dims.end(), 0);
  if (a.n_ > kMaxDimension) throw ConfigError("dimension exceeds " + std::to_string(kMaxDimension));
  a.offsets_.assign(1, 0);
  for (std::size_t layer = 0; layer < spec.layer_dims.size(); ++layer) {
    for (int m = 0; m < spec.layer_dims[layer]; ++m) a.degrees_.push_back(static_cast<int>(layer + 1));
    a.offsets_.push_back(a.offsets_.back() + spec.layer_dims[layer]);
  }

  const int n = a.n_;
  a.dense_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n), Rational(0));
  std::vector<char> explicit_entry(a.dense_.size(), 0);
  for (const auto& b : spec.brackets) {
    if (b.i < 1 || b.i > n || b.j < 1 || b.j > n || b.k < 1 || b.k > n)
      throw ConfigError("bracket index out of range: (" + std::to_string(b.i) + "," + std::to_string(b.j) + "," +
                        std::to_string(b.k) + ")");
    const std::size_t idx = a.index(b.i - 1, b.j - 1, b.k - 1);
    if (explicit_entry[idx]) throw ConfigError("duplicate bracket entry");
    explicit_entry[idx] = 1;
    a.dense_[idx] = b.c;
  }
  if (spec.implied_antisymmetry) {
    for (const auto& b : spec.brackets) {
      const std::size_t rev = a.index(b.j - 1, b.i - 1, b.k - 1);
      if (!explicit_entry[rev]) a.dense_[rev] = -b.c;
    }
  }

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (a.c(i, j, k) != -a.c(j, i, k))
          throw AntisymmetryViolation("antisymmetry fails for [e" + std::to_string(i + 1) + ",e" +
                                      std::to_string(j + 1) + "] along e" + std::to_string(k + 1));

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (a.c(i, j, k) != 0 && a.degree(k) != a.degree(i) + a.degree(j)) throw GradingViolation(i + 1, j + 1, k + 1);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (a.c(i, j, k) != 0) a.constants_.push_back({i, j, k, a.c(i, j, k)});

  // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0 along every e_m.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          Rational s = 0;
          for (int l = 0; l < n; ++l)
            s += a.c(i, j, l) * a.c(l, k, m) + a.c(j, k, l) * a.c(l, i, m) + a.c(k, i, l) * a.c(l, j, m);
          if (s != 0) throw JacobiViolation(i + 1, j + 1, k + 1);
        }
  return a;
}

namespace algebras {

inline GradedAlgebraSpec abelian_w12() { return {"abelian_w12", {1, 1}, {}}; }

inline GradedAlgebraSpec heisenberg() { return {"heisenberg", {2, 1}, {{1, 2, 3, Rational(1)}}}; }

inline GradedAlgebraSpec engel() {
  return {"engel", {2, 1, 1}, {{1, 2, 3, Rational(1)}, {1, 3, 4, Rational(1)}}};
}

inline std::vector<std::pair<std::string, std::string>> catalog() {
  return {{"abelian_w12", "abelian R^2 with coordinate degrees 1 and 2"},
          {"heisenberg", "first Heisenberg group, layers (2,1), [e1,e2]=e3"},
          {"engel", "Engel group, layers (2,1,1), [e1,e2]=e3, [e1,e3]=e4"}};
}

inline GradedAlgebraSpec by_name(const std::string& name) {
  if (name == "abelian_w12") return abelian_w12();
  if (name == "heisenberg") return heisenberg();
  if (name == "engel") return engel();
  throw ConfigError("unknown group '" + name + "'");
}

}  // namespace algebras
}  // namespace carnot
