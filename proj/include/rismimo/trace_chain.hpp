// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/config.hpp"

#include <initializer_list>

namespace rismimo {

// Complex value with its derivative with respect to the real phase vector.
// An empty gradient means "constant" and keeps rate-only evaluation cheap.
struct Dual {
  cd v = 0.0;
  VectorXcd g;

  Dual() = default;
  Dual(cd value) : v(value) {}
  Dual(double value) : v(value) {}
  Dual(cd value, VectorXcd grad) : v(value), g(std::move(grad)) {}

  double re() const { return v.real(); }
  // Real part of the gradient; zero-length gradients expand to zeros.
  VectorXd real_grad(int n) const;
};

Dual operator+(const Dual& a, const Dual& b);
Dual operator-(const Dual& a, const Dual& b);
Dual operator*(const Dual& a, const Dual& b);
Dual operator/(const Dual& a, const Dual& b);
Dual operator-(const Dual& a);
Dual conj(const Dual& a);
Dual real(const Dual& a);
Dual abs2(const Dual& a);
Dual square(const Dual& a);

// One factor of a product chain: a fixed matrix, Phi or Phi^H.
struct ChainFactor {
  enum class Kind { matrix, phi, phi_h };
  Kind kind = Kind::matrix;
  const MatrixXcd* m = nullptr;

  static ChainFactor mat(const MatrixXcd& x) { return {Kind::matrix, &x}; }
  static ChainFactor phi() { return {Kind::phi, nullptr}; }
  static ChainFactor phi_h() { return {Kind::phi_h, nullptr}; }
};

// Evaluates products that contain Phi = diag(c) several times and returns
// their exact derivative in theta by summing one term per Phi occurrence.
class ChainEvaluator {
 public:
  ChainEvaluator(VectorXcd c, bool with_gradient);

  // u^H F_1 ... F_L w
  Dual vector_chain(const VectorXcd& u, std::initializer_list<ChainFactor> factors, const VectorXcd& w) const;
  // Tr{F_1 ... F_L}
  Dual trace_chain(std::initializer_list<ChainFactor> factors) const;

  bool with_gradient() const { return grad_; }
  int size() const { return int(c_.size()); }
  const VectorXcd& c() const { return c_; }

 private:
  VectorXcd c_;
  bool grad_;
};

// d Tr{A Phi B Phi^H} / dtheta = j Phi^T (A^T o B) c^* - j Phi^H (A o B^T) c.
// Returned as complex; the value is real when A and B are Hermitian.
VectorXcd grad_quadratic_form(const MatrixXcd& A, const MatrixXcd& B, const VectorXd& theta);

// Hermitian shortcut 2 Im{Phi^H (A o B^T) c}.
VectorXd grad_quadratic_form_hermitian(const MatrixXcd& A, const MatrixXcd& B, const VectorXd& theta);

} // namespace rismimo
