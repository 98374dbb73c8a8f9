// SPDX-License-Identifier: MIT
#include "rismimo/trace_chain.hpp"

#include <vector>

namespace rismimo {

namespace {

const cd kJ(0.0, 1.0);

// sa*a + sb*b, treating empty vectors as zero.
VectorXcd combine(const VectorXcd& a, cd sa, const VectorXcd& b, cd sb) {
  if (a.size() == 0 && b.size() == 0) return {};
  if (a.size() == 0) return sb * b;
  if (b.size() == 0) return sa * a;
  return sa * a + sb * b;
}

VectorXcd scaled(const VectorXcd& a, cd s) {
  if (a.size() == 0) return {};
  return s * a;
}

} // namespace

VectorXd Dual::real_grad(int n) const {
  if (g.size() == 0) return VectorXd::Zero(n);
  return g.real();
}

Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, combine(a.g, 1.0, b.g, 1.0)}; }
Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, combine(a.g, 1.0, b.g, -1.0)}; }
Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, combine(a.g, b.v, b.g, a.v)}; }
Dual operator/(const Dual& a, const Dual& b) {
  const cd q = a.v / b.v;
  return {q, combine(a.g, 1.0 / b.v, b.g, -q / b.v)};
}
Dual operator-(const Dual& a) { return {-a.v, scaled(a.g, -1.0)}; }
Dual conj(const Dual& a) {
  return {std::conj(a.v), a.g.size() ? VectorXcd(a.g.conjugate()) : VectorXcd()};
}
Dual real(const Dual& a) {
  return {a.v.real(), a.g.size() ? VectorXcd(a.g.real().cast<cd>()) : VectorXcd()};
}
Dual abs2(const Dual& a) { return real(conj(a) * a); }
Dual square(const Dual& a) { return a * a; }

ChainEvaluator::ChainEvaluator(VectorXcd c, bool with_gradient) : c_(std::move(c)), grad_(with_gradient) {}

Dual ChainEvaluator::vector_chain(const VectorXcd& u, std::initializer_list<ChainFactor> factors,
                                  const VectorXcd& w) const {
  const std::vector<ChainFactor> fs(factors);
  const std::size_t L = fs.size();
  // right[t] = F_{t+1} ... F_L w
  std::vector<VectorXcd> right(L + 1);
  right[L] = w;
  for (std::size_t t = L; t-- > 0;) {
    const auto& f = fs[t];
    switch (f.kind) {
      case ChainFactor::Kind::matrix: right[t] = (*f.m) * right[t + 1]; break;
      case ChainFactor::Kind::phi: right[t] = c_.cwiseProduct(right[t + 1]); break;
      case ChainFactor::Kind::phi_h: right[t] = c_.conjugate().cwiseProduct(right[t + 1]); break;
    }
  }
  Dual out;
  out.v = u.dot(right[0]);
  if (!grad_) return out;
  // left row vector u^H F_1 ... F_{t-1}, stored as a column of its entries
  VectorXcd left = u.conjugate();
  VectorXcd g = VectorXcd::Zero(c_.size());
  for (std::size_t t = 0; t < L; ++t) {
    const auto& f = fs[t];
    switch (f.kind) {
      case ChainFactor::Kind::matrix: left = (f.m->transpose() * left).eval(); break;
      case ChainFactor::Kind::phi:
        g += kJ * left.cwiseProduct(c_).cwiseProduct(right[t + 1]);
        left = left.cwiseProduct(c_).eval();
        break;
      case ChainFactor::Kind::phi_h:
        g -= kJ * left.cwiseProduct(c_.conjugate()).cwiseProduct(right[t + 1]);
        left = left.cwiseProduct(c_.conjugate()).eval();
        break;
    }
  }
  out.g = std::move(g);
  return out;
}

namespace {

MatrixXcd apply_left(const ChainFactor& f, const MatrixXcd& X, const VectorXcd& c) {
  switch (f.kind) {
    case ChainFactor::Kind::matrix: return (*f.m) * X;
    case ChainFactor::Kind::phi: return c.asDiagonal() * X;
    case ChainFactor::Kind::phi_h: return c.conjugate().asDiagonal() * X;
  }
  return X;
}

MatrixXcd apply_right(const MatrixXcd& X, const ChainFactor& f, const VectorXcd& c) {
  switch (f.kind) {
    case ChainFactor::Kind::matrix: return X * (*f.m);
    case ChainFactor::Kind::phi: return X * c.asDiagonal();
    case ChainFactor::Kind::phi_h: return X * c.conjugate().asDiagonal();
  }
  return X;
}

} // namespace

Dual ChainEvaluator::trace_chain(std::initializer_list<ChainFactor> factors) const {
  const std::vector<ChainFactor> fs(factors);
  const std::size_t L = fs.size();
  const Eigen::Index n = c_.size();
  // suffix[t] = F_{t+1} ... F_L
  std::vector<MatrixXcd> suffix(L + 1);
  suffix[L] = MatrixXcd::Identity(n, n);
  for (std::size_t t = L; t-- > 0;) suffix[t] = apply_left(fs[t], suffix[t + 1], c_);
  Dual out;
  out.v = suffix[0].trace();
  if (!grad_) return out;
  VectorXcd g = VectorXcd::Zero(n);
  MatrixXcd prefix = MatrixXcd::Identity(n, n);
  for (std::size_t t = 0; t < L; ++t) {
    const auto& f = fs[t];
    if (f.kind != ChainFactor::Kind::matrix) {
      // d Tr{P dPhi S} = sum_n [S P]_{nn} dPhi_nn
      const VectorXcd d = suffix[t + 1].cwiseProduct(prefix.transpose()).rowwise().sum();
      if (f.kind == ChainFactor::Kind::phi)
        g += kJ * c_.cwiseProduct(d);
      else
        g -= kJ * c_.conjugate().cwiseProduct(d);
    }
    prefix = apply_right(prefix, f, c_);
  }
  out.g = std::move(g);
  return out;
}

VectorXcd grad_quadratic_form(const MatrixXcd& A, const MatrixXcd& B, const VectorXd& theta) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows() || A.rows() != theta.size())
    throw Error(Errc::invalid_dimension, "grad_quadratic_form: A, B must be N x N with N = len(theta)");
  VectorXcd c(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) c[n] = std::polar(1.0, theta[n]);
  const VectorXcd t1 = c.asDiagonal() * (A.transpose().cwiseProduct(B) * c.conjugate());
  const VectorXcd t2 = c.conjugate().asDiagonal() * (A.cwiseProduct(B.transpose()) * c);
  return kJ * t1 - kJ * t2;
}

VectorXd grad_quadratic_form_hermitian(const MatrixXcd& A, const MatrixXcd& B, const VectorXd& theta) {
  VectorXcd c(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) c[n] = std::polar(1.0, theta[n]);
  return 2.0 * (c.conjugate().asDiagonal() * (A.cwiseProduct(B.transpose()) * c)).imag();
}

} // namespace rismimo
