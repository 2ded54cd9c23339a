#pragma once

// Truncated power series in ε with coefficients of any ring-like type:
// double, Jet, dense matrices of either.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bimetric/errors.hpp"
#include "bimetric/jet.hpp"

namespace bimetric {

inline constexpr double kSeriesLeadFloor = 1e-12;
inline constexpr double kMaxCondition = 1e12;

template <class T>
class EpsSeries {
 public:
  EpsSeries() = default;
  EpsSeries(int order, const T& zero) : c_(order + 1, zero) {}
  explicit EpsSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("eps series: empty coefficient list");
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int k) const { return c_[k]; }
  T& operator[](int k) { return c_[k]; }
  const std::vector<T>& coeffs() const { return c_; }

  EpsSeries& operator+=(const EpsSeries& o) {
    check_order(*this, o);
    for (size_t k = 0; k < c_.size(); ++k) c_[k] = T(c_[k] + o.c_[k]);
    return *this;
  }
  EpsSeries& operator-=(const EpsSeries& o) {
    check_order(*this, o);
    for (size_t k = 0; k < c_.size(); ++k) c_[k] = T(c_[k] - o.c_[k]);
    return *this;
  }
  friend EpsSeries operator+(EpsSeries a, const EpsSeries& b) { return a += b; }
  friend EpsSeries operator-(EpsSeries a, const EpsSeries& b) { return a -= b; }
  friend EpsSeries operator*(const EpsSeries& a, const EpsSeries& b) {
    return cauchy(a, b, [](const T& x, const T& y) { return T(x * y); });
  }

  template <class F>
  auto map(F f) const {
    using U = decltype(f(c_[0]));
    std::vector<U> out;
    out.reserve(c_.size());
    for (const auto& x : c_) out.push_back(f(x));
    return EpsSeries<U>(std::move(out));
  }

  friend void check_order(const EpsSeries& a, const EpsSeries& b) {
    if (a.order() != b.order()) throw std::invalid_argument("eps series: order mismatch");
  }

 private:
  std::vector<T> c_;
};

// Cauchy product under an arbitrary bilinear op: c_k = Σ_{i+j=k} op(a_i, b_j).
template <class A, class B, class Op>
auto cauchy(const EpsSeries<A>& a, const EpsSeries<B>& b, Op op) {
  if (a.order() != b.order()) throw std::invalid_argument("eps series: order mismatch");
  using C = decltype(op(a[0], b[0]));
  std::vector<C> out;
  out.reserve(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) {
    C s = op(a[0], b[k]);
    for (int i = 1; i <= k; ++i) s = C(s + op(a[i], b[k - i]));
    out.push_back(std::move(s));
  }
  return EpsSeries<C>(std::move(out));
}

template <class T>
EpsSeries<T> series_add(const EpsSeries<T>& a, const EpsSeries<T>& b) {
  return a + b;
}
template <class T>
EpsSeries<T> series_mul(const EpsSeries<T>& a, const EpsSeries<T>& b) {
  return a * b;
}

template <class T, class S>
EpsSeries<T> scale(const EpsSeries<T>& a, const S& s) {
  return a.map([&](const T& x) { return T(x * s); });
}

// Unit series [1, 0, ..., 0].
template <class T>
EpsSeries<T> unit_series(int order, const T& one, const T& zero) {
  EpsSeries<T> r(order, zero);
  r[0] = one;
  return r;
}

template <class T>
EpsSeries<T> series_recip(const EpsSeries<T>& a) {
  if (!(std::abs(value_of(a[0])) > kSeriesLeadFloor)) throw DomainError("series_recip: leading coefficient near zero");
  std::vector<T> b;
  b.reserve(a.order() + 1);
  const T inv0 = T(T(1.0) / a[0]);
  b.push_back(inv0);
  for (int k = 1; k <= a.order(); ++k) {
    T s = T(a[1] * b[k - 1]);
    for (int i = 2; i <= k; ++i) s = T(s + a[i] * b[k - i]);
    b.push_back(T(-(inv0 * s)));
  }
  return EpsSeries<T>(std::move(b));
}

template <class T>
EpsSeries<T> series_sqrt(const EpsSeries<T>& a) {
  using std::sqrt;
  if (!(value_of(a[0]) > 0)) throw DomainError("series_sqrt: non-positive leading coefficient");
  std::vector<T> s;
  s.reserve(a.order() + 1);
  s.push_back(T(sqrt(a[0])));
  const T half_inv = T(T(0.5) / s[0]);
  for (int k = 1; k <= a.order(); ++k) {
    T acc = a[k];
    for (int i = 1; i < k; ++i) acc = T(acc - s[i] * s[k - i]);
    s.push_back(T(acc * half_inv));
  }
  return EpsSeries<T>(std::move(s));
}

inline double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) == 0.0) return INFINITY;
  return sv(0) / sv(sv.size() - 1);
}

// Neumann recursion X_k = -X_0 Σ_{i≥1} A_i X_{k-i} with X_0 = A_0^{-1}.
// Matrix entries may be double or Jet; the condition number of the value
// part of A_0 is written to *cond when requested.
inline Eigen::MatrixXd leading_inverse(const Eigen::MatrixXd& a) { return a.inverse(); }
inline JetMatrix leading_inverse(const JetMatrix& a) { return jet_matrix_inverse(a); }

inline bool is_zero_matrix(const Eigen::MatrixXd& a) { return (a.array() == 0).all(); }
inline bool is_zero_matrix(const JetMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!(a(i).partials().array() == 0).all()) return false;
  return true;
}

template <class Scalar>
EpsSeries<MatX<Scalar>> series_matrix_inverse(const EpsSeries<MatX<Scalar>>& a, double* cond = nullptr) {
  const MatX<Scalar>& a0 = a[0];
  Eigen::MatrixXd v0 = a0.unaryExpr([](const Scalar& s) { return value_of(s); });
  const double c = condition_number(v0);
  if (cond) *cond = c;
  if (!(c <= kMaxCondition)) throw DomainError("series_matrix_inverse: leading matrix singular or ill-conditioned");
  std::vector<MatX<Scalar>> x;
  x.reserve(a.order() + 1);
  x.push_back(leading_inverse(a0));
  for (int k = 1; k <= a.order(); ++k) {
    MatX<Scalar> s = mat_mul(a[1], x[k - 1]);
    for (int i = 2; i <= k; ++i)
      if (!is_zero_matrix(a[i])) s += mat_mul(a[i], x[k - i]);
    x.push_back(-mat_mul(x[0], s));
  }
  return EpsSeries<MatX<Scalar>>(std::move(x));
}

// Series determinant by Gaussian elimination over EpsSeries<double>
// entries: used as an independent route to the volume coefficients.
inline EpsSeries<double> series_determinant(const EpsSeries<Eigen::MatrixXd>& a) {
  const int n = static_cast<int>(a[0].rows());
  const int N = a.order();
  std::vector<std::vector<EpsSeries<double>>> m(n, std::vector<EpsSeries<double>>(n, EpsSeries<double>(N, 0.0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k <= N; ++k) m[i][j][k] = a[k](i, j);
  EpsSeries<double> det = unit_series(N, 1.0, 0.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col][0]) > std::abs(m[piv][col][0])) piv = r;
    if (!(std::abs(m[piv][col][0]) > kSeriesLeadFloor)) throw DomainError("series_determinant: singular leading matrix");
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = scale(det, -1.0);
    }
    det = det * m[col][col];
    const EpsSeries<double> inv = series_recip(m[col][col]);
    for (int r = col + 1; r < n; ++r) {
      const EpsSeries<double> f = m[r][col] * inv;
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace bimetric
