#pragma once

// Reference BCH evaluator for tests. It works on concrete rational vectors,
// enumerating the block tuples (r_1, s_1, ..., r_n, s_n) of the Dynkin series
// directly and bracketing with a dense table built from the raw bracket list,
// so it shares no code with the symbolic construction of Q.

#include "carnot/algebra.hpp"
#include "carnot/rational.hpp"

#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using carnot::Rational;
using Point = std::vector<Rational>;

class DynkinOracle {
 public:
  explicit DynkinOracle(const carnot::GradedAlgebraSpec& spec) {
    n_ = std::accumulate(spec.layer_dims.begin(), spec.layer_dims.end(), 0);
    step_ = static_cast<int>(spec.layer_dims.size());
    table_.assign(static_cast<std::size_t>(n_ * n_ * n_), Rational(0));
    for (const auto& b : spec.brackets) {
      set(b.i - 1, b.j - 1, b.k - 1, b.c);
      set(b.j - 1, b.i - 1, b.k - 1, -b.c);
    }
  }

  int dimension() const { return n_; }

  Point bracket(const Point& a, const Point& b) const {
    Point out(static_cast<std::size_t>(n_), Rational(0));
    for (int i = 0; i < n_; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < n_; ++j) {
        if (b[j] == 0) continue;
        for (int k = 0; k < n_; ++k) {
          const Rational& c = table_[idx(i, j, k)];
          if (c != 0) out[k] += c * a[i] * b[j];
        }
      }
    }
    return out;
  }

  /// log(exp X exp Y) truncated at the nilpotency step.
  Point bch(const Point& x, const Point& y) const {
    Point total(static_cast<std::size_t>(n_), Rational(0));
    std::vector<std::pair<int, int>> blocks;
    std::function<void(int)> extend = [&](int used) {
      if (!blocks.empty()) accumulate(total, blocks, used, x, y);
      for (int r = 0; used + r <= step_; ++r)
        for (int s = 0; used + r + s <= step_; ++s) {
          if (r + s == 0) continue;
          blocks.emplace_back(r, s);
          extend(used + r + s);
          blocks.pop_back();
        }
    };
    extend(0);
    return total;
  }

  /// BCH(x, y) - x - y.
  Point q(const Point& x, const Point& y) const {
    Point out = bch(x, y);
    for (int i = 0; i < n_; ++i) out[i] -= x[i] + y[i];
    return out;
  }

 private:
  std::size_t idx(int i, int j, int k) const { return static_cast<std::size_t>((i * n_ + j) * n_ + k); }
  void set(int i, int j, int k, const Rational& c) { table_[idx(i, j, k)] = c; }

  static Rational fact(int m) {
    Rational f(1);
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  }

  void accumulate(Point& total, const std::vector<std::pair<int, int>>& blocks, int length, const Point& x,
                  const Point& y) const {
    std::vector<const Point*> word;
    Rational denom(length);
    for (const auto& [r, s] : blocks) {
      for (int i = 0; i < r; ++i) word.push_back(&x);
      for (int i = 0; i < s; ++i) word.push_back(&y);
      denom *= fact(r) * fact(s);
    }
    const int n = static_cast<int>(blocks.size());
    Rational coeff = Rational(n % 2 == 1 ? 1 : -1) / (Rational(n) * denom);
    Point value = *word.back();
    for (int i = static_cast<int>(word.size()) - 2; i >= 0; --i) value = bracket(*word[static_cast<std::size_t>(i)], value);
    for (int k = 0; k < n_; ++k) total[k] += coeff * value[k];
  }

  int n_ = 0;
  int step_ = 0;
  std::vector<Rational> table_;
};

}  // namespace oracle
