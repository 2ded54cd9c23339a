#pragma once

// Multivariate Taylor jets: all partial derivatives of a scalar up to a
// fixed total degree, propagated forward through arithmetic and elementary
// functions.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "bimetric/errors.hpp"

namespace bimetric {

inline constexpr int kMaxJetDim = 8;
inline constexpr int kMaxJetDegree = 5;
// Jets up to this many partials (dim 4, degree 3) live inline; larger
// layouts spill to the heap.
inline constexpr int kJetInline = 35;
inline constexpr double kJetSingularFloor = 1e-12;

using MultiIndex = std::array<std::uint8_t, kMaxJetDim>;

// Index tables for one (dim, degree) pair. Multi-indices are graded by
// total degree, so the layout of degree d-1 is a prefix of degree d.
class JetLayout {
 public:
  struct MulTerm {
    int a, b;
    double coeff;
  };

  static const JetLayout& get(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(alpha_.size()); }
  int size_upto(int d) const { return start_[d + 1]; }
  const MultiIndex& alpha(int i) const { return alpha_[i]; }
  int order(int i) const;
  double alpha_factorial(int i) const { return factorial_[i]; }

  // -1 when the multi-index exceeds the degree.
  int index(const MultiIndex& a) const;
  int index_of_coords(std::initializer_list<int> coords) const;

  const MulTerm* mul_begin(int g) const { return terms_.data() + mul_offset_[g]; }
  const MulTerm* mul_end(int g) const { return terms_.data() + mul_offset_[g + 1]; }
  // shift(k)[i] is the index of alpha_i + e_k, for |alpha_i| < degree.
  const std::vector<int>& shift(int k) const { return shift_[k]; }
  // Layout of degree one lower (same dim); null at degree 0.
  const JetLayout* lower() const { return lower_; }

 private:
  friend struct LayoutCache;
  JetLayout(int dim, int degree);

  int dim_, degree_;
  std::vector<MultiIndex> alpha_;
  std::vector<int> start_;
  std::vector<double> factorial_;
  std::vector<int> mul_offset_;
  std::vector<MulTerm> terms_;
  std::vector<std::vector<int>> shift_;
  const JetLayout* lower_ = nullptr;
};

// Contiguous partials with a small inline buffer; copies touch only the
// used prefix.
template <class Scalar>
class JetStorage {
 public:
  JetStorage() = default;
  explicit JetStorage(int n) { resize(n); }
  JetStorage(const JetStorage& o) { assign(o.data(), o.n_); }
  JetStorage(JetStorage&& o) noexcept { *this = std::move(o); }
  JetStorage& operator=(const JetStorage& o) {
    if (this != &o) assign(o.data(), o.n_);
    return *this;
  }
  JetStorage& operator=(JetStorage&& o) noexcept {
    if (this == &o) return *this;
    if (o.heap_) {
      heap_ = std::move(o.heap_);
      n_ = o.n_;
    } else {
      assign(o.buf_.data(), o.n_);
    }
    return *this;
  }

  int size() const { return n_; }
  Scalar* data() { return heap_ ? heap_.get() : buf_.data(); }
  const Scalar* data() const { return heap_ ? heap_.get() : buf_.data(); }
  Scalar& operator[](int i) { return data()[i]; }
  const Scalar& operator[](int i) const { return data()[i]; }

  // Resizes to n entries, all zero.
  void zero(int n) {
    resize(n);
    std::fill(data(), data() + n, Scalar(0));
  }
  // Keeps the first n entries.
  void shrink(int n) {
    if (heap_ && n <= kJetInline) {
      std::copy(heap_.get(), heap_.get() + n, buf_.data());
      heap_.reset();
    }
    n_ = n;
  }

 private:
  void resize(int n) {
    if (n > kJetInline) {
      if (!heap_ || n_ < n) heap_.reset(new Scalar[n]);
    } else {
      heap_.reset();
    }
    n_ = n;
  }
  void assign(const Scalar* src, int n) {
    if (n > kJetInline) {
      std::unique_ptr<Scalar[]> h(new Scalar[n]);
      std::copy(src, src + n, h.get());
      heap_ = std::move(h);
    } else {
      std::copy(src, src + n, buf_.data());
      heap_.reset();
    }
    n_ = n;
  }

  int n_ = 0;
  std::array<Scalar, kJetInline> buf_;
  std::unique_ptr<Scalar[]> heap_;
};

// A jet without a layout is a plain constant; it promotes when combined
// with a full jet, which lets Eigen matrices of jets default-construct.
template <class Scalar>
class JetT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using ConstMap = Eigen::Map<const Vector>;

  JetT() : c_(1) { c_[0] = Scalar(0); }
  template <class A, std::enable_if_t<std::is_arithmetic_v<A>, int> = 0>
  JetT(A v) : c_(1) {  // NOLINT: implicit constant
    c_[0] = static_cast<Scalar>(v);
  }

  static JetT constant(int dim, int degree, Scalar v) {
    JetT j(&JetLayout::get(dim, degree));
    j.c_[0] = v;
    return j;
  }
  // The coordinate function x_k (0-based) with value v.
  static JetT variable(int dim, int degree, int k, Scalar v) {
    JetT j = constant(dim, degree, v);
    if (degree >= 1) j.c_[1 + k] = Scalar(1);
    return j;
  }
  static JetT from_partials(const JetLayout& layout, const Vector& p) {
    if (p.size() != layout.size()) throw std::invalid_argument("jet: partial count does not match the layout");
    JetT j(&layout);
    for (int i = 0; i < layout.size(); ++i) j.c_[i] = p[i];
    return j;
  }

  bool is_plain() const { return layout_ == nullptr; }
  const JetLayout* layout() const { return layout_; }
  int dim() const { return layout_ ? layout_->dim() : 0; }
  int degree() const { return layout_ ? layout_->degree() : 0; }
  int size() const { return static_cast<int>(c_.size()); }

  Scalar value() const { return c_[0]; }
  ConstMap partials() const { return ConstMap(c_.data(), c_.size()); }
  Scalar operator[](int i) const { return c_[i]; }
  Scalar& operator[](int i) { return c_[i]; }

  // d({0, 1}) is the mixed partial along coordinates 0 and 1.
  Scalar d(std::initializer_list<int> coords) const {
    if (coords.size() == 0) return c_[0];
    if (!layout_) return Scalar(0);
    const int i = layout_->index_of_coords(coords);
    if (i < 0) throw std::out_of_range("jet: partial beyond stored degree");
    return c_[i];
  }
  // First partial along coordinate k; the graded layout stores them at 1 + k.
  Scalar grad(int k) const { return layout_ && layout_->degree() >= 1 ? c_[1 + k] : Scalar(0); }
  Scalar taylor(int i) const { return c_[i] / layout_->alpha_factorial(i); }

  // Derivative along coordinate k; the result has degree one lower.
  JetT partial(int k) const {
    if (!layout_) return JetT();
    if (k < 0 || k >= layout_->dim()) throw std::out_of_range("jet: partial index");
    if (layout_->degree() == 0) return constant(layout_->dim(), 0, Scalar(0));
    const JetLayout& lo = *layout_->lower();
    JetT r(&lo);
    const auto& sh = layout_->shift(k);
    for (int i = 0; i < lo.size(); ++i) r.c_[i] = c_[sh[i]];
    return r;
  }

  JetT truncate(int degree) const {
    if (!layout_ || degree >= layout_->degree()) return *this;
    const JetLayout* lo = layout_;
    while (lo->degree() > degree) lo = lo->lower();
    JetT r(lo);
    r.c_ = c_;
    r.c_.shrink(lo->size());
    return r;
  }

  bool all_finite() const { return partials().allFinite(); }

  JetT operator-() const {
    JetT r = *this;
    for (int i = 0; i < r.c_.size(); ++i) r.c_[i] = -r.c_[i];
    return r;
  }
  JetT& operator+=(const JetT& o) { return accumulate(o, Scalar(1)); }
  JetT& operator-=(const JetT& o) { return accumulate(o, Scalar(-1)); }
  JetT& operator*=(const JetT& o) { return *this = *this * o; }

  // *this += s·a·b without temporaries.
  JetT& add_product(const JetT& a, const JetT& b, Scalar s = Scalar(1)) {
    if (a.is_plain()) return accumulate(b, s * a.c_[0]);
    if (b.is_plain()) return accumulate(a, s * b.c_[0]);
    check_same(a, b);
    if (is_plain()) {
      const Scalar v = c_[0];
      *this = JetT(a.layout_);
      c_[0] = v;
    } else {
      check_same(*this, a);
    }
    const JetLayout& L = *a.layout_;
    const Scalar *pa = a.c_.data(), *pb = b.c_.data();
    Scalar* pr = c_.data();
    for (int g = 0; g < L.size(); ++g) {
      Scalar acc(0);
      for (auto t = L.mul_begin(g); t != L.mul_end(g); ++t) acc += t->coeff * pa[t->a] * pb[t->b];
      pr[g] += s * acc;
    }
    return *this;
  }
  // *this += s·a.
  JetT& add_scaled(const JetT& a, Scalar s) { return accumulate(a, s); }
  JetT& operator/=(const JetT& o) { return *this = *this / o; }

  friend JetT operator+(JetT a, const JetT& b) { return a += b; }
  friend JetT operator-(JetT a, const JetT& b) { return a -= b; }
  friend JetT operator*(const JetT& a, const JetT& b) {
    if (a.is_plain()) return b.scaled(a.c_[0]);
    if (b.is_plain()) return a.scaled(b.c_[0]);
    check_same(a, b);
    const JetLayout& L = *a.layout_;
    JetT r(&L);
    const Scalar *pa = a.c_.data(), *pb = b.c_.data();
    Scalar* pr = r.c_.data();
    for (int g = 0; g < L.size(); ++g) {
      Scalar s(0);
      for (auto t = L.mul_begin(g); t != L.mul_end(g); ++t) s += t->coeff * pa[t->a] * pb[t->b];
      pr[g] = s;
    }
    return r;
  }
  friend JetT operator/(const JetT& a, const JetT& b) {
    if (b.is_plain()) {
      if (std::abs(b.c_[0]) <= kJetSingularFloor) throw DomainError("jet: division by zero");
      return a.scaled(Scalar(1) / b.c_[0]);
    }
    return a * recip(b);
  }

  friend bool operator==(const JetT& a, const JetT& b) {
    if (a.layout_ != b.layout_) return false;
    return a.partials() == b.partials();
  }

  // f(a0 + δ) = Σ f^(k)(a0)/k! δ^k with derivs[k] = f^(k)(a0).
  JetT compose(const Scalar* derivs) const {
    if (!layout_) return JetT(derivs[0]);
    JetT delta = *this;
    delta.c_[0] = Scalar(0);
    const int D = layout_->degree();
    Scalar kfact(1);
    for (int k = 2; k <= D; ++k) kfact *= Scalar(k);
    JetT r = constant(layout_->dim(), D, derivs[D] / kfact);
    for (int k = D - 1; k >= 0; --k) {
      kfact /= Scalar(k + 1);
      r = r * delta;
      r.c_[0] += derivs[k] / kfact;
    }
    return r;
  }

  friend JetT recip(const JetT& a) {
    const Scalar v = a.value();
    if (!(std::abs(v) > kJetSingularFloor)) throw DomainError("jet: reciprocal of a value near zero");
    std::array<Scalar, kMaxJetDegree + 1> d{};
    Scalar p = Scalar(1) / v;
    for (int k = 0; k <= kMaxJetDegree; ++k) {
      d[k] = p;
      p *= -Scalar(k + 1) / v;
    }
    return a.compose(d.data());
  }

 private:
  explicit JetT(const JetLayout* L) : layout_(L) { c_.zero(L->size()); }

  static void check_same(const JetT& a, const JetT& b) {
    if (a.layout_ != b.layout_) throw std::logic_error("jet: dimension or degree mismatch");
  }
  JetT scaled(Scalar s) const {
    JetT r = *this;
    for (int i = 0; i < r.c_.size(); ++i) r.c_[i] *= s;
    return r;
  }
  JetT& accumulate(const JetT& o, Scalar sign) {
    if (o.is_plain()) {
      c_[0] += sign * o.c_[0];
      return *this;
    }
    if (is_plain()) {
      const Scalar v = c_[0];
      *this = o.scaled(sign);
      c_[0] += v;
      return *this;
    }
    check_same(*this, o);
    Scalar* d = c_.data();
    const Scalar* e = o.c_.data();
    for (int i = 0; i < c_.size(); ++i) d[i] += sign * e[i];
    return *this;
  }

  const JetLayout* layout_ = nullptr;
  JetStorage<Scalar> c_;
};

using Jet = JetT<double>;

template <class S>
JetT<S> jet_mul(const JetT<S>& a, const JetT<S>& b) {
  if (!a.is_plain() && !b.is_plain() && a.layout() != b.layout())
    throw std::logic_error("jet_mul: dimension or degree mismatch");
  return a * b;
}
template <class S>
JetT<S> jet_recip(const JetT<S>& a) {
  return recip(a);
}

template <class S>
JetT<S> exp(const JetT<S>& a) {
  std::array<S, kMaxJetDegree + 1> d;
  d.fill(std::exp(a.value()));
  return a.compose(d.data());
}

template <class S>
JetT<S> log(const JetT<S>& a) {
  const S v = a.value();
  if (!(v > S(0))) throw DomainError("jet: log of a non-positive value");
  std::array<S, kMaxJetDegree + 1> d;
  d[0] = std::log(v);
  S p = S(1) / v;
  for (int k = 1; k <= kMaxJetDegree; ++k) {
    d[k] = p;
    p *= -S(k) / v;
  }
  return a.compose(d.data());
}

template <class S>
JetT<S> sin(const JetT<S>& a) {
  const S s = std::sin(a.value()), c = std::cos(a.value());
  const S cyc[4] = {s, c, -s, -c};
  std::array<S, kMaxJetDegree + 1> d;
  for (int k = 0; k <= kMaxJetDegree; ++k) d[k] = cyc[k % 4];
  return a.compose(d.data());
}

template <class S>
JetT<S> cos(const JetT<S>& a) {
  const S s = std::sin(a.value()), c = std::cos(a.value());
  const S cyc[4] = {c, -s, -c, s};
  std::array<S, kMaxJetDegree + 1> d;
  for (int k = 0; k <= kMaxJetDegree; ++k) d[k] = cyc[k % 4];
  return a.compose(d.data());
}

// Real power of a positive base.
template <class S>
JetT<S> pow(const JetT<S>& a, S p) {
  const S v = a.value();
  if (!(v > S(0))) throw DomainError("jet: real power of a non-positive value");
  std::array<S, kMaxJetDegree + 1> d;
  S coef(1);
  for (int k = 0; k <= kMaxJetDegree; ++k) {
    d[k] = coef * std::pow(v, p - S(k));
    coef *= p - S(k);
  }
  return a.compose(d.data());
}

template <class S>
JetT<S> sqrt(const JetT<S>& a) {
  if (!(a.value() > S(0))) throw DomainError("jet: sqrt of a non-positive value");
  return pow(a, S(0.5));
}

// Integer power by repeated squaring; negative exponents go through recip.
template <class S>
JetT<S> ipow(const JetT<S>& a, int n) {
  if (n < 0) return recip(ipow(a, -n));
  JetT<S> r(S(1)), b = a;
  if (!a.is_plain()) r = JetT<S>::constant(a.dim(), a.degree(), S(1));
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

template <class S>
S value_of(const JetT<S>& j) {
  return j.value();
}
inline double value_of(double x) { return x; }
inline double value_of(__float128 x) { return static_cast<double>(x); }

}  // namespace bimetric

namespace Eigen {
template <class S>
struct NumTraits<bimetric::JetT<S>> : NumTraits<S> {
  using Real = bimetric::JetT<S>;
  using NonInteger = bimetric::JetT<S>;
  using Nested = bimetric::JetT<S>;
  using Literal = bimetric::JetT<S>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 8,
    MulCost = 64
  };
};
}  // namespace Eigen

namespace bimetric {

template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using JetMatrix = MatX<Jet>;

// Gauss-Jordan inverse with partial pivoting on values; works for any
// scalar type with value_of. Throws DomainError on a pivot below floor.
template <class Scalar>
MatX<Scalar> gauss_jordan_inverse(MatX<Scalar> a, double floor = kJetSingularFloor) {
  const Eigen::Index n = a.rows();
  MatX<Scalar> inv = MatX<Scalar>::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(piv, col)))) piv = r;
    if (!(std::abs(value_of(a(piv, col))) > floor)) throw DomainError("matrix inverse: singular pivot");
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      inv.row(piv).swap(inv.row(col));
    }
    const Scalar p = a(col, col);
    for (Eigen::Index c = 0; c < n; ++c) {
      a(col, c) = a(col, c) / p;
      inv(col, c) = inv(col, c) / p;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const Scalar f = a(r, col);
      for (Eigen::Index c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

// Matrix product; for jets the entries accumulate in place.
inline Eigen::MatrixXd mat_mul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a * b; }
namespace detail {
// The common layout of the non-plain entries, or null when there is none or
// the entries disagree.
template <class S>
const JetLayout* shared_layout(const MatX<JetT<S>>& m, const JetLayout* seen, bool* mixed) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const JetLayout* l = m(i).layout();
    if (!l) continue;
    if (seen && l != seen) *mixed = true;
    seen = l;
  }
  return seen;
}
// Fixed 4×4 case: per partial, C_g = Σ coeff · A_a B_b over the Leibniz
// table, with plain matrices A_a, B_b of the stored partials.
inline MatX<JetT<double>> mat_mul4(const MatX<JetT<double>>& a, const MatX<JetT<double>>& b, const JetLayout& L) {
  using M4 = Eigen::Matrix4d;
  const int G = L.size();
  std::vector<M4> A(G, M4::Zero()), B(G, M4::Zero());
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const JetT<double>&ea = a(i, j), &eb = b(i, j);
      for (int g = 0; g < ea.size(); ++g) A[g](i, j) = ea[g];
      for (int g = 0; g < eb.size(); ++g) B[g](i, j) = eb[g];
    }
  MatX<JetT<double>> c(4, 4);
  for (Eigen::Index i = 0; i < 16; ++i) c(i) = JetT<double>::constant(L.dim(), L.degree(), 0.0);
  for (int g = 0; g < G; ++g) {
    M4 acc = M4::Zero();
    for (auto t = L.mul_begin(g); t != L.mul_end(g); ++t) acc.noalias() += t->coeff * (A[t->a] * B[t->b]);
    for (Eigen::Index i = 0; i < 16; ++i) c(i)[g] = acc(i);
  }
  return c;
}
}  // namespace detail

template <class S>
MatX<JetT<S>> mat_mul(const MatX<JetT<S>>& a, const MatX<JetT<S>>& b) {
  if constexpr (std::is_same_v<S, double>) {
    bool mixed = false;
    const JetLayout* L = detail::shared_layout(b, detail::shared_layout(a, nullptr, &mixed), &mixed);
    if (L && !mixed && a.rows() == 4 && a.cols() == 4 && b.cols() == 4) return detail::mat_mul4(a, b, *L);
  }
  MatX<JetT<S>> c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      JetT<S> acc;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc.add_product(a(i, k), b(k, j));
      c(i, j) = std::move(acc);
    }
  return c;
}
// Jet matrix times a plain matrix: no Leibniz products needed.
template <class S>
MatX<JetT<S>> mat_mul(const MatX<JetT<S>>& a, const Eigen::MatrixXd& b) {
  MatX<JetT<S>> c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      JetT<S> acc;
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        if (b(k, j) != 0) acc.add_scaled(a(i, k), S(b(k, j)));
      c(i, j) = std::move(acc);
    }
  return c;
}

// Inverse of a jet matrix A = A₀ + δA, where δA has vanishing values and is
// therefore nilpotent at the stored degree D:
// A⁻¹ = Σ_{k=0}^{D} (−A₀⁻¹ δA)^k A₀⁻¹.
inline JetMatrix jet_matrix_inverse(const JetMatrix& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd a0(n, n);
  int degree = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      a0(i, j) = a(i, j).value();
      degree = std::max(degree, a(i, j).degree());
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a0);
  if (!lu.isInvertible()) throw DomainError("matrix inverse: singular leading values");
  const Eigen::MatrixXd v = lu.inverse();
  // M = −V δA, with V entering as plain scalars.
  JetMatrix delta = a;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) delta(i, j)[0] = 0.0;
  JetMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Jet acc;
      for (Eigen::Index k = 0; k < n; ++k) acc.add_scaled(delta(k, j), -v(i, k));
      m(i, j) = std::move(acc);
    }
  JetMatrix term = v.cast<Jet>();
  JetMatrix sum = term;
  for (int k = 1; k <= degree; ++k) {
    term = k == 1 ? mat_mul(m, v) : mat_mul(m, term);
    sum += term;
  }
  return sum;
}

// Values and derivatives of a jet matrix, entrywise.
inline Eigen::MatrixXd values(const JetMatrix& m) {
  return m.unaryExpr([](const Jet& j) { return j.value(); });
}
inline JetMatrix partial(const JetMatrix& m, int k) {
  return m.unaryExpr([k](const Jet& j) { return j.partial(k); });
}
inline JetMatrix truncate(const JetMatrix& m, int degree) {
  return m.unaryExpr([degree](const Jet& j) { return j.truncate(degree); });
}

}  // namespace bimetric
