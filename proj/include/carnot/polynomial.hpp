#pragma once

#include "carnot/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

using Exponents = std::vector<std::uint16_t>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms live in an ordered map, so iteration order (and therefore printing
/// and compilation) is deterministic. Zero coefficients are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

  static Polynomial constant(std::size_t num_vars, const Rational& c) {
    Polynomial p(num_vars);
    if (c != 0) p.terms_.emplace(Exponents(num_vars, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t num_vars, std::size_t index) {
    if (index >= num_vars) throw std::out_of_range("polynomial variable index");
    Polynomial p(num_vars);
    Exponents e(num_vars, 0);
    e[index] = 1;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  std::size_t num_vars() const { return num_vars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t num_terms() const { return terms_.size(); }
  const std::map<Exponents, Rational>& terms() const { return terms_; }

  Rational coefficient(const Exponents& e) const {
    const auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Exponents& e, const Rational& c) {
    if (e.size() != num_vars_) throw std::invalid_argument("monomial arity mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial out(a.num_vars_);
    Exponents e(a.num_vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial out(num_vars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d = e;
      const unsigned power = d[var];
      d[var] = static_cast<std::uint16_t>(power - 1);
      out.add_term(d, c * power);
    }
    return out;
  }

  /// Sets the variables in [first, last) to zero.
  Polynomial zero_variables(std::size_t first, std::size_t last) const {
    Polynomial out(num_vars_);
    for (const auto& [e, c] : terms_) {
      bool vanishes = false;
      for (std::size_t i = first; i < last; ++i) vanishes = vanishes || e[i] != 0;
      if (!vanishes) out.terms_.emplace(e, c);
    }
    return out;
  }

  /// Keeps the first `count` variables; every term must be free of the others.
  Polynomial truncate_variables(std::size_t count) const {
    Polynomial out(count);
    for (const auto& [e, c] : terms_) {
      for (std::size_t i = count; i < e.size(); ++i)
        if (e[i] != 0) throw std::logic_error("truncate_variables: dropped variable is present");
      out.terms_.emplace(Exponents(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(count)), c);
    }
    return out;
  }

  bool depends_on(std::size_t var) const {
    return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first[var] != 0; });
  }

  /// Weighted degree of a single monomial, d(alpha) = sum weights_j alpha_j.
  static int weighted_degree(const Exponents& e, std::span<const int> weights) {
    int d = 0;
    for (std::size_t i = 0; i < e.size(); ++i) d += weights[i] * e[i];
    return d;
  }

  /// The common weighted degree of all terms, if there is one. The zero
  /// polynomial is homogeneous of every degree and reports nullopt.
  std::optional<int> homogeneous_degree(std::span<const int> weights) const {
    std::optional<int> deg;
    for (const auto& [e, c] : terms_) {
      const int d = weighted_degree(e, weights);
      if (deg && *deg != d) return std::nullopt;
      deg = d;
    }
    return deg;
  }

  bool is_homogeneous_of(int degree, std::span<const int> weights) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const auto& t) { return weighted_degree(t.first, weights) == degree; });
  }

  template <class T>
  T evaluate(std::span<const T> vars) const {
    if (vars.size() != num_vars_) throw std::invalid_argument("evaluate: arity mismatch");
    T sum = T(0);
    for (const auto& [e, c] : terms_) {
      T term = convert<T>(c);
      for (std::size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) term *= vars[i];
      sum += term;
    }
    return sum;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // Print in descending map order so leading monomials come first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      const bool negative = c < 0;
      const Rational mag = negative ? Rational(-c) : c;
      if (first) {
        if (negative) out << "-";
      } else {
        out << (negative ? " - " : " + ");
      }
      first = false;
      bool has_var = false;
      std::ostringstream mono;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (has_var) mono << "*";
        mono << names.at(i);
        if (e[i] > 1) mono << "^" << e[i];
        has_var = true;
      }
      if (!has_var) {
        out << carnot::to_string(mag);
      } else if (mag == 1) {
        out << mono.str();
      } else if (denominator(mag) == 1) {
        out << carnot::to_string(mag) << "*" << mono.str();
      } else {
        out << "(" << carnot::to_string(mag) << ")*" << mono.str();
      }
    }
    return out.str();
  }

 private:
  template <class T>
  static T convert(const Rational& c) {
    if constexpr (std::is_same_v<T, Rational>) {
      return c;
    } else {
      return static_cast<T>(to_double(c));
    }
  }

  void check_arity(const Polynomial& o) const {
    if (o.num_vars_ != num_vars_) throw std::invalid_argument("polynomial arity mismatch");
  }

  std::size_t num_vars_ = 0;
  std::map<Exponents, Rational> terms_;
};

/// Floating-point evaluation form of a Polynomial for hot loops.
///
/// Variables come from up to two contiguous blocks: indices below `split`
/// read from the first block, the rest from the second. This lets Q(x, y)
/// be evaluated without concatenating x and y.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p, std::size_t split = static_cast<std::size_t>(-1))
      : split_(std::min(split, p.num_vars())) {
    for (const auto& [e, c] : p.terms()) {
      Term t;
      t.coeff = to_double(c);
      t.first = static_cast<std::uint32_t>(factors_.size());
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0) factors_.push_back({static_cast<std::uint16_t>(i), e[i]});
      t.last = static_cast<std::uint32_t>(factors_.size());
      terms_.push_back(t);
    }
  }

  bool is_zero() const { return terms_.empty(); }

  double operator()(const double* a, const double* b = nullptr) const {
    double sum = 0.0;
    for (const Term& t : terms_) {
      double v = t.coeff;
      for (std::uint32_t f = t.first; f < t.last; ++f) {
        const Factor& fac = factors_[f];
        const double x = fac.var < split_ ? a[fac.var] : b[fac.var - split_];
        for (unsigned k = 0; k < fac.power; ++k) v *= x;
      }
      sum += v;
    }
    return sum;
  }

 private:
  struct Term {
    double coeff = 0.0;
    std::uint32_t first = 0;
    std::uint32_t last = 0;
  };
  struct Factor {
    std::uint16_t var;
    std::uint16_t power;
  };
  std::size_t split_ = 0;
  std::vector<Term> terms_;
  std::vector<Factor> factors_;
};

}  // namespace carnot
