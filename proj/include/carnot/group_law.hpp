#pragma once

#include "carnot/algebra.hpp"
#include "carnot/errors.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/types.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace carnot {

namespace detail {

/// Lie-algebra valued polynomial: one Polynomial per basis coordinate.
using SymbolicElement = std::vector<Polynomial>;

inline SymbolicElement symbolic_bracket(const ValidatedAlgebra& alg, const SymbolicElement& a,
                                        const SymbolicElement& b) {
  const std::size_t vars = a.front().num_vars();
  SymbolicElement out(static_cast<std::size_t>(alg.dimension()), Polynomial(vars));
  for (const auto& sc : alg.structure_constants()) {
    const auto& ai = a[static_cast<std::size_t>(sc.i)];
    const auto& bj = b[static_cast<std::size_t>(sc.j)];
    if (ai.is_zero() || bj.is_zero()) continue;
    out[static_cast<std::size_t>(sc.k)] += (ai * bj) * sc.c;
  }
  return out;
}

/// Dynkin coefficient of the right-nested bracket [w_1,[w_2,...,[w_{m-1},w_m]]]
/// of a word over {X, Y} (true = Y). It sums (-1)^{n-1} / (n m prod r_i! s_i!)
/// over every factorisation of the word into n blocks X^{r_i} Y^{s_i} with
/// r_i + s_i > 0.
inline Rational dynkin_word_coefficient(const std::vector<bool>& word) {
  const std::size_t m = word.size();
  // ways[p][c]: sum over factorisations of word[p..m) into c blocks of 1/prod(r!s!).
  std::vector<std::vector<Rational>> ways(m + 1, std::vector<Rational>(m + 1, Rational(0)));
  ways[m][0] = 1;
  for (std::size_t p = m; p-- > 0;) {
    // A block starting at p is X^r Y^s: a run of X's then a run of Y's.
    std::size_t r = 0;
    while (p + r < m && !word[p + r]) ++r;
    for (std::size_t rr = 0; rr <= r; ++rr) {
      // Block takes rr X's; if rr < r the block must end right there (no Y).
      const std::size_t after_x = p + rr;
      const std::size_t max_s = (rr == r) ? [&] {
        std::size_t s = 0;
        while (after_x + s < m && word[after_x + s]) ++s;
        return s;
      }()
                                          : 0;
      for (std::size_t s = 0; s <= max_s; ++s) {
        if (rr + s == 0) continue;
        const std::size_t end = after_x + s;
        const Rational weight = 1 / (factorial(static_cast<unsigned>(rr)) * factorial(static_cast<unsigned>(s)));
        for (std::size_t c = 0; c < m; ++c)
          if (ways[end][c] != 0) ways[p][c + 1] += weight * ways[end][c];
      }
    }
  }
  Rational total = 0;
  for (std::size_t nblocks = 1; nblocks <= m; ++nblocks) {
    if (ways[0][nblocks] == 0) continue;
    const Rational sign = (nblocks % 2 == 1) ? Rational(1) : Rational(-1);
    total += sign * ways[0][nblocks] / Rational(static_cast<long long>(nblocks * m));
  }
  return total;
}

}  // namespace detail

/// Polynomial group law x.y = x + y + Q(x, y) in exponential coordinates of
/// the first kind. Q_i is a polynomial in the 2n variables (x_1..x_n, y_1..y_n).
class GroupLaw {
 public:
  explicit GroupLaw(ValidatedAlgebra algebra) : algebra_(std::move(algebra)) {
    const int n = algebra_.dimension();
    const auto nn = static_cast<std::size_t>(n);
    detail::SymbolicElement X(nn, Polynomial(2 * nn)), Y(nn, Polynomial(2 * nn));
    for (std::size_t i = 0; i < nn; ++i) {
      X[i] = Polynomial::variable(2 * nn, i);
      Y[i] = Polynomial::variable(2 * nn, nn + i);
    }
    q_.assign(nn, Polynomial(2 * nn));

    // Words of length m >= 2 up to the step; longer brackets vanish by the grading.
    // Nested brackets are shared through their suffixes.
    std::map<std::vector<bool>, detail::SymbolicElement> nested;
    nested[{false}] = X;
    nested[{true}] = Y;
    std::vector<std::vector<bool>> current = {{false}, {true}};
    for (int m = 2; m <= algebra_.step(); ++m) {
      std::vector<std::vector<bool>> next;
      for (const auto& suffix : current) {
        for (bool letter : {false, true}) {
          std::vector<bool> word;
          word.reserve(suffix.size() + 1);
          word.push_back(letter);
          word.insert(word.end(), suffix.begin(), suffix.end());
          auto value = detail::symbolic_bracket(algebra_, letter ? Y : X, nested.at(suffix));
          const bool vanishes = std::all_of(value.begin(), value.end(), [](const Polynomial& p) { return p.is_zero(); });
          if (vanishes) continue;
          const Rational coeff = detail::dynkin_word_coefficient(word);
          if (coeff != 0)
            for (std::size_t i = 0; i < nn; ++i) q_[i] += value[i] * coeff;
          nested.emplace(word, std::move(value));
          next.push_back(std::move(word));
        }
      }
      current = std::move(next);
    }
    compiled_.reserve(nn);
    for (const auto& p : q_) compiled_.emplace_back(p, nn);
  }

  const ValidatedAlgebra& algebra() const { return algebra_; }
  int dimension() const { return algebra_.dimension(); }
  const std::vector<int>& degrees() const { return algebra_.degrees(); }
  /// Q_i(x, y), variables ordered x_1..x_n, y_1..y_n.
  const std::vector<Polynomial>& Q() const { return q_; }
  const Polynomial& Q(int i) const { return q_[static_cast<std::size_t>(i)]; }

  /// out = x.y; `out` may alias neither input.
  void multiply(const double* x, const double* y, double* out) const {
    const int n = dimension();
    for (int i = 0; i < n; ++i) out[i] = x[i] + y[i] + compiled_[static_cast<std::size_t>(i)](x, y);
  }

  /// (x^{-1}).y without materialising the inverse.
  void left_difference(const double* x, const double* y, double* out) const {
    std::array<double, kMaxDimension> neg{};
    const int n = dimension();
    for (int i = 0; i < n; ++i) neg[static_cast<std::size_t>(i)] = -x[i];
    multiply(neg.data(), y, out);
  }

  Vector multiply(const Vector& x, const Vector& y) const {
    check_dim(x.size());
    check_dim(y.size());
    Vector out(dimension());
    multiply(x.data(), y.data(), out.data());
    return out;
  }

  RationalPoint multiply(const RationalPoint& x, const RationalPoint& y) const {
    check_dim(static_cast<Eigen::Index>(x.size()));
    check_dim(static_cast<Eigen::Index>(y.size()));
    RationalPoint xy(x);
    xy.insert(xy.end(), y.begin(), y.end());
    RationalPoint out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i] + q_[i].evaluate<Rational>(xy);
    return out;
  }

  /// Inverse in exponential coordinates is negation.
  static Vector inverse(const Vector& x) { return -x; }
  static RationalPoint inverse(const RationalPoint& x) {
    RationalPoint out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    return out;
  }

  Vector dilate(double r, const Vector& x) const {
    if (!(r > 0)) throw PreconditionError("dilation factor must be positive");
    check_dim(x.size());
    Vector out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = std::pow(r, algebra_.degree(static_cast<int>(j))) * x[j];
    return out;
  }

  RationalPoint dilate(const Rational& r, const RationalPoint& x) const {
    if (!(r > 0)) throw PreconditionError("dilation factor must be positive");
    check_dim(static_cast<Eigen::Index>(x.size()));
    RationalPoint out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      Rational p = 1;
      for (int k = 0; k < algebra_.degree(static_cast<int>(j)); ++k) p *= r;
      out[j] = p * x[j];
    }
    return out;
  }

  /// Variable names x1..xn, y1..yn for printing Q.
  std::vector<std::string> variable_names() const {
    std::vector<std::string> names;
    for (int i = 1; i <= dimension(); ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= dimension(); ++i) names.push_back("y" + std::to_string(i));
    return names;
  }

 private:
  void check_dim(Eigen::Index size) const {
    if (size != dimension())
      throw PreconditionError("point dimension " + std::to_string(size) + " does not match group dimension " +
                              std::to_string(dimension()));
  }

  ValidatedAlgebra algebra_;
  std::vector<Polynomial> q_;
  std::vector<CompiledPolynomial> compiled_;
};

inline GroupLaw bch_group_law(const ValidatedAlgebra& algebra) { return GroupLaw(algebra); }

inline Vector multiply(const GroupLaw& law, const Vector& x, const Vector& y) { return law.multiply(x, y); }
inline RationalPoint multiply(const GroupLaw& law, const RationalPoint& x, const RationalPoint& y) {
  return law.multiply(x, y);
}
inline Vector inverse(const Vector& x) { return GroupLaw::inverse(x); }
inline RationalPoint inverse(const RationalPoint& x) { return GroupLaw::inverse(x); }
inline Vector dilate(const GroupLaw& law, double r, const Vector& x) { return law.dilate(r, x); }
inline RationalPoint dilate(const GroupLaw& law, const Rational& r, const RationalPoint& x) { return law.dilate(r, x); }

}  // namespace carnot
