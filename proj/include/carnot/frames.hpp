#pragma once

#include "carnot/group_law.hpp"

#include <string>
#include <vector>

namespace carnot {

/// Coefficients of a tangent vector in the left-invariant frame at `base`.
/// They equal the coordinates of the vector pulled back to the identity.
struct FrameCoordinates {
  Vector lambda;
  Vector base;

  double norm() const { return lambda.norm(); }
};

/// Left-invariant frame X_j = d/dx_j + sum_{d_l > d_j} a^l_j(x) d/dx_l.
///
/// a^l_j(x) = d/dy_j Q_l(x, y) at y = 0, derived symbolically from the group
/// law. The frame matrix A(x) = I + (a^l_j(x)) is unit lower-triangular.
class Frame {
 public:
  explicit Frame(const GroupLaw& law) : degrees_(law.degrees()) {
    const int n = law.dimension();
    const auto nn = static_cast<std::size_t>(n);
    coeff_.assign(nn * nn, Polynomial(nn));
    compiled_.resize(nn * nn);
    jac_.resize(nn * nn);
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        const Polynomial dq = law.Q(l).derivative(nn + static_cast<std::size_t>(j));
        jac_[at(l, j)] = CompiledPolynomial(dq, nn);
        if (degrees_[static_cast<std::size_t>(l)] <= degrees_[static_cast<std::size_t>(j)]) continue;
        Polynomial a = dq.zero_variables(nn, 2 * nn).truncate_variables(nn);
        compiled_[at(l, j)] = CompiledPolynomial(a);
        coeff_[at(l, j)] = std::move(a);
      }
    }
  }

  int dimension() const { return static_cast<int>(degrees_.size()); }
  const std::vector<int>& degrees() const { return degrees_; }

  /// a^l_j as an exact polynomial in x (zero unless d_l > d_j).
  const Polynomial& a(int l, int j) const { return coeff_[at(l, j)]; }

  Matrix frame_matrix(const Vector& x) const {
    const int n = dimension();
    Matrix A = Matrix::Identity(n, n);
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < l; ++j) A(l, j) += compiled_[at(l, j)](x.data());
    return A;
  }

  /// Solves A(x) lambda = v by forward substitution.
  Vector solve(const Vector& x, const Vector& v) const {
    const int n = dimension();
    Vector lambda(n);
    for (int l = 0; l < n; ++l) {
      double s = v[l];
      for (int j = 0; j < l; ++j) {
        const auto& c = compiled_[at(l, j)];
        if (!c.is_zero()) s -= c(x.data()) * lambda[j];
      }
      lambda[l] = s;
    }
    return lambda;
  }

  /// Ambient vector sum_j lambda_j X_j(x).
  Vector reconstruct(const Vector& x, const Vector& lambda) const { return frame_matrix(x) * lambda; }

  /// Jacobian of the left translation l_x at y: I + d/dy Q(x, y).
  Matrix translation_jacobian(const Vector& x, const Vector& y) const {
    const int n = dimension();
    Matrix J = Matrix::Identity(n, n);
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j) J(l, j) += jac_[at(l, j)](x.data(), y.data());
    return J;
  }

  /// Text rendering "a^l_j = ..." of every nonzero coefficient.
  std::vector<std::string> describe() const {
    std::vector<std::string> names;
    for (int i = 1; i <= dimension(); ++i) names.push_back("x" + std::to_string(i));
    std::vector<std::string> lines;
    for (int l = 0; l < dimension(); ++l)
      for (int j = 0; j < dimension(); ++j)
        if (!a(l, j).is_zero())
          lines.push_back("a^" + std::to_string(l + 1) + "_" + std::to_string(j + 1) + " = " + a(l, j).to_string(names));
    return lines;
  }

 private:
  std::size_t at(int l, int j) const {
    return static_cast<std::size_t>(l) * degrees_.size() + static_cast<std::size_t>(j);
  }

  std::vector<int> degrees_;
  std::vector<Polynomial> coeff_;
  std::vector<CompiledPolynomial> compiled_;
  std::vector<CompiledPolynomial> jac_;
};

inline Frame compute_frame(const GroupLaw& law) { return Frame(law); }

inline Matrix frame_matrix(const Frame& frame, const Vector& x) { return frame.frame_matrix(x); }

inline FrameCoordinates frame_coordinates(const Frame& frame, const Vector& x, const Vector& v) {
  return {frame.solve(x, v), x};
}

/// Left translation by x carries the tangent vector with frame coordinates
/// `tau` at y to the vector with the same frame coordinates at x.y.
inline FrameCoordinates translate_vector(const GroupLaw& law, const Vector& x, const FrameCoordinates& tau) {
  return {tau.lambda, law.multiply(x, tau.base)};
}

/// Ambient pushforward dl_x(v) of an ambient vector v at y.
inline Vector pushforward(const Frame& frame, const Vector& x, const Vector& y, const Vector& v) {
  return frame.translation_jacobian(x, y) * v;
}

}  // namespace carnot
