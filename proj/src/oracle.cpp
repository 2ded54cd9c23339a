#include "bimetric/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bimetric {

namespace {

using quad = __float128;

quad nested_difference(const Expr& e, std::vector<quad>& x, const std::vector<int>& coords, size_t depth, quad h) {
  if (depth == coords.size()) return eval(e, x.data());
  const int k = coords[depth];
  const quad saved = x[k];
  x[k] = saved + h;
  const quad fp = nested_difference(e, x, coords, depth + 1, h);
  x[k] = saved - h;
  const quad fm = nested_difference(e, x, coords, depth + 1, h);
  x[k] = saved;
  return (fp - fm) / (2 * h);
}

// Taylor coefficients c_0..c_deg of the polynomial through (j h, f_j),
// j = -m..m, with deg = 2m.
std::vector<double> symmetric_fit(const std::vector<double>& samples, int m, double h) {
  const int n = 2 * m + 1;
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) {
    const double t = r - m;
    double p = 1;
    for (int c = 0; c < n; ++c) {
      V(r, c) = p;
      p *= t;
    }
    y(r) = samples[r];
  }
  Eigen::VectorXd a = V.fullPivLu().solve(y);
  std::vector<double> c(n);
  double hp = 1;
  for (int k = 0; k < n; ++k) {
    c[k] = a(k) / hp;
    hp *= h;
  }
  return c;
}

}  // namespace

std::vector<SeriesExtraction> extract_series_fd(const std::function<std::vector<double>(double)>& f, int order,
                                                double h) {
  if (order < 0) throw ConfigError("extract_series_fd: negative order");
  if (!(h > 0)) throw ConfigError("extract_series_fd: step must be positive");
  const int m = std::max(1, (order + 1) / 2);
  auto sample = [&](double eps) {
    try {
      return f(eps);
    } catch (const DomainError& err) {
      std::ostringstream os;
      os << err.what() << " (at eps = " << eps << ")";
      throw DomainError(os.str());
    }
  };
  const std::vector<double> f0 = sample(0.0);
  const size_t nf = f0.size();
  auto level = [&](double step) {
    std::vector<std::vector<double>> s(nf, std::vector<double>(2 * m + 1));
    for (int j = -m; j <= m; ++j) {
      const std::vector<double> v = j == 0 ? f0 : sample(j * step);
      for (size_t c = 0; c < nf; ++c) s[c][j + m] = v[c];
    }
    std::vector<std::vector<double>> fits;
    for (size_t c = 0; c < nf; ++c) fits.push_back(symmetric_fit(s[c], m, step));
    return fits;
  };
  const auto coarse = level(h), fine = level(h / 2);

  std::vector<SeriesExtraction> out(nf);
  for (size_t c = 0; c < nf; ++c) {
    SeriesExtraction& e = out[c];
    e.h = h;
    e.richardson_levels = 2;
    e.coeffs.push_back(f0[c]);
    e.errors.push_back(0.0);
    for (int k = 1; k <= order; ++k) {
      // Leading truncation power for the k-th coefficient of a symmetric stencil.
      const int p = (k % 2 == 1) ? 2 * m + 1 - k : 2 * m + 2 - k;
      const double w = std::ldexp(1.0, p);
      e.coeffs.push_back((w * fine[c][k] - coarse[c][k]) / (w - 1));
      e.errors.push_back(std::abs(fine[c][k] - coarse[c][k]));
    }
  }
  return out;
}

SeriesExtraction extract_series_fd(const std::function<double(double)>& f, int order, double h) {
  return extract_series_fd([&](double e) { return std::vector<double>{f(e)}; }, order, h)[0];
}

double fd_partial(const Expr& e, const std::vector<double>& x, const std::vector<int>& coords, double h) {
  std::vector<quad> xq(x.begin(), x.end());
  return static_cast<double>(nested_difference(e, xq, coords, 0, h));
}

double spatial_fd_check(const Expr& e, const std::vector<double>& x, int degree) {
  const int dim = static_cast<int>(x.size());
  const Jet j = jet_eval(e, x.data(), dim, degree);
  const JetLayout& L = *j.layout();
  double scale = 0;
  for (int i = 0; i < L.size(); ++i) scale = std::max(scale, std::abs(j[i]));
  if (scale == 0) scale = 1;
  double worst = 0;
  for (int i = 0; i < L.size(); ++i) {
    std::vector<int> coords;
    for (int k = 0; k < dim; ++k)
      for (int r = 0; r < L.alpha(i)[k]; ++r) coords.push_back(k);
    double fd;
    if (coords.empty()) {
      fd = eval(e, x.data());
    } else {
      const double coarse = fd_partial(e, x, coords, 1e-3);
      const double fine = fd_partial(e, x, coords, 1e-4);
      fd = (100 * fine - coarse) / 99;
    }
    worst = std::max(worst, std::abs(fd - j[i]) / std::max(std::abs(j[i]), scale));
  }
  return worst;
}

namespace {

Jet jet_det(JetMatrix a) {
  const Eigen::Index n = a.rows();
  Jet det = Jet(1.0);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c).value()) > std::abs(a(piv, c).value())) piv = r;
    if (!(std::abs(a(piv, c).value()) > 0)) return Jet(0.0);
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      det = -det;
    }
    det = det * a(c, c);
    const Jet inv = recip(a(c, c));
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const Jet f = a(r, c) * inv;
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

struct Collapsed {
  int n;
  JetMatrix g, ginv;                 // degree 2
  std::vector<JetMatrix> gamma;      // Γ^k(i, j), degree 1
  Jet rho;                           // √det g, degree 1
  double r;
};

Collapsed collapse(const MetricScene& s, double eps, const ChartPoint& x) {
  check_point(s, x);
  const int n = s.dim;
  Collapsed c;
  c.n = n;
  c.g.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet v = jet_eval(s.gbar(i, j), x.data(), n, 2);
      if (eps != 0 && !is_zero_literal(s.gpert(i, j))) v += jet_eval(s.gpert(i, j), x.data(), n, 2) * Jet(eps);
      c.g(i, j) = c.g(j, i) = v;
    }
  const double piv = spd_min_pivot(values(c.g));
  if (!(piv > 0)) {
    std::ostringstream os;
    os << "collapsed metric is not positive definite (smallest pivot " << piv << ")";
    throw DomainError(os.str());
  }
  c.ginv = gauss_jordan_inverse<Jet>(c.g);

  // Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  std::vector<JetMatrix> dg;
  for (int l = 0; l < n; ++l) dg.push_back(partial(c.g, l));
  const JetMatrix gi1 = truncate(c.ginv, 1);
  c.gamma.assign(n, JetMatrix(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc;
        for (int l = 0; l < n; ++l) acc += gi1(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        c.gamma[k](i, j) = acc * Jet(0.5);
      }

  // Ricci: R_jl = ∂_k Γ^k_jl − ∂_j Γ^k_kl + Γ^k_kα Γ^α_jl − Γ^k_jα Γ^α_kl; r = g^{jl} R_jl.
  double r = 0;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double ric = 0;
      for (int k = 0; k < n; ++k) {
        ric += c.gamma[k](j, l).d({k}) - c.gamma[k](k, l).d({j});
        for (int al = 0; al < n; ++al)
          ric += c.gamma[k](k, al).value() * c.gamma[al](j, l).value() -
                 c.gamma[k](j, al).value() * c.gamma[al](k, l).value();
      }
      r += c.ginv(j, l).value() * ric;
    }
  c.r = r;
  c.rho = sqrt(jet_det(truncate(c.g, 1)));
  return c;
}

// Δh = −ρ⁻¹ ∂_i(ρ g^{ij} ∂_j h) for a jet h of degree ≥ 2.
double divergence_laplacian(const Collapsed& c, const Jet& h) {
  const int n = c.n;
  const Jet h2 = h.truncate(2);
  double div = 0;
  for (int i = 0; i < n; ++i) {
    Jet flux;
    for (int j = 0; j < n; ++j) flux += truncate(c.ginv, 1)(i, j) * h2.partial(j);
    div += (c.rho * flux).d({i});
  }
  return -div / c.rho.value();
}

Eigen::MatrixXd covariant_hessian(const Collapsed& c, const Jet& f) {
  const int n = c.n;
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = f.d({i, j});
      for (int k = 0; k < n; ++k) v -= c.gamma[k](i, j).value() * f.d({k});
      H(i, j) = v;
    }
  return H;
}

}  // namespace

ExactValues exact_all_at_eps(const MetricScene& s, double eps, const ChartPoint& x, const Probes& p) {
  const Collapsed c = collapse(s, eps, x);
  const int n = c.n;
  ExactValues v;
  v.r = c.r;
  v.ginv = values(c.ginv);
  for (int k = 0; k < n; ++k) v.gamma.push_back(values(c.gamma[k]));
  v.sqrt_det = c.rho.value();
  v.sqrt_det_ratio = std::sqrt(values(c.g).determinant() / metric_at(s, x, 0.0).determinant());

  if (p.u) {
    const Jet u = jet_eval(p.u, x.data(), n, 2);
    v.lap_u = divergence_laplacian(c, u);
    v.conf_lap_u = v.lap_u + (n - 2.0) / (4.0 * (n - 1.0)) * c.r * u.value();
  }
  if (p.f1 && p.f2) {
    const Jet f1 = jet_eval(p.f1, x.data(), n, 3), f2 = jet_eval(p.f2, x.data(), n, 3);
    // P = g^{ij} ∂_i f1 ∂_j f2 as a degree-2 jet.
    Jet P;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) P += c.ginv(i, j) * f1.partial(i) * f2.partial(j);
    v.t = P.value();
    v.a = divergence_laplacian(c, P);
    const Eigen::MatrixXd H1 = covariant_hessian(c, f1), H2 = covariant_hessian(c, f2);
    v.b = (v.ginv * H1 * v.ginv * H2.transpose()).trace();
    v.d = divergence_laplacian(c, f1) * divergence_laplacian(c, f2);
    v.a4 = c.r * v.t / 3 + v.a + v.b - v.d / 2;
  }
  return v;
}

double exact_at_eps(const MetricScene& s, double eps, const Query& q, const ChartPoint& x, const Probes& p) {
  const ExactValues v = exact_all_at_eps(s, eps, x, p);
  switch (q.q) {
    case Quantity::ScalarCurvature: return v.r;
    case Quantity::Laplacian: return v.lap_u;
    case Quantity::ConformalLaplacian: return v.conf_lap_u;
    case Quantity::Pairing: return v.t;
    case Quantity::LaplacianOfPairing: return v.a;
    case Quantity::HessianPairing: return v.b;
    case Quantity::LaplacianProduct: return v.d;
    case Quantity::A4: return v.a4;
    case Quantity::SqrtDetRatio: return v.sqrt_det_ratio;
    case Quantity::InverseMetric: return v.ginv(q.i, q.j);
    case Quantity::Christoffel: return v.gamma[q.k](q.i, q.j);
  }
  throw std::logic_error("exact_at_eps: unknown quantity");
}

double safe_eps_step(const MetricScene& s, const ChartPoint& x, int order, double h, int* halvings) {
  const int m = std::max(1, (order + 1) / 2);
  const double radius = eps_radius(s, x, 1.0);
  int k = 0;
  while (!(m * h < radius)) {
    if (++k > 4) throw DomainError("no ε step inside the SPD radius at the point");
    h /= 2;
  }
  if (halvings) *halvings = k;
  return h;
}

SeriesExtraction extract_scene_series(const MetricScene& s, const ChartPoint& x, const Query& query, const Probes& p,
                                      int order, double h) {
  int halvings = 0;
  h = safe_eps_step(s, x, order, h, &halvings);
  SeriesExtraction e = extract_series_fd([&](double eps) { return exact_at_eps(s, eps, query, x, p); }, order, h);
  e.halvings = halvings;
  return e;
}

std::vector<std::string> exact_field_names() {
  return {"r", "lap_u", "conf_lap_u", "t", "a", "b", "d", "a4", "sqrt_det_ratio"};
}

std::vector<double> exact_fields(const ExactValues& v) {
  return {v.r, v.lap_u, v.conf_lap_u, v.t, v.a, v.b, v.d, v.a4, v.sqrt_det_ratio};
}

std::vector<SeriesExtraction> extract_all_series(const MetricScene& s, const ChartPoint& x, const Probes& p, int order,
                                                 double h) {
  int halvings = 0;
  h = safe_eps_step(s, x, order, h, &halvings);
  auto out = extract_series_fd([&](double eps) { return exact_fields(exact_all_at_eps(s, eps, x, p)); }, order, h);
  for (auto& e : out) e.halvings = halvings;
  return out;
}

}  // namespace bimetric
