#include "bimetric/functional.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace bimetric {

namespace {

constexpr std::size_t kBlock = 4096;

std::string node_text(const ChartPoint& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

int worker_count(ParallelOptions par) {
  if (par.threads > 0) return par.threads;
  const unsigned h = std::thread::hardware_concurrency();
  return h ? static_cast<int>(h) : 1;
}

// Evaluates fn(x, out) for every node and returns the `width` column sums.
// Nodes are grouped into fixed blocks; each block and then the block sums are
// reduced pairwise, so the result does not depend on the worker count. The
// failure of the lowest-numbered block wins.
std::vector<double> grid_reduce(const QuadratureGrid& grid, int width,
                                const std::function<void(const ChartPoint&, double*)>& fn, ParallelOptions par) {
  const std::size_t n = grid.size();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> block_sums(blocks * width, 0.0);
  std::atomic<std::size_t> next{0};
  std::mutex fail_mu;
  std::size_t fail_block = blocks;
  std::exception_ptr failure;

  auto work = [&] {
    std::vector<double> buf(kBlock * width);
    std::vector<double> row(width);
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      {
        std::lock_guard<std::mutex> lock(fail_mu);
        if (b > fail_block) return;
      }
      const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
      try {
        for (std::size_t i = lo; i < hi; ++i) {
          const ChartPoint x = grid.node(i);
          std::fill(row.begin(), row.end(), 0.0);
          fn(x, row.data());
          for (int c = 0; c < width; ++c) {
            if (!std::isfinite(row[c])) throw DomainError("non-finite integrand at node " + node_text(x));
            buf[c * kBlock + (i - lo)] = row[c];
          }
        }
        for (int c = 0; c < width; ++c) block_sums[b * width + c] = pairwise_sum(&buf[c * kBlock], hi - lo);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mu);
        if (b < fail_block) {
          fail_block = b;
          failure = std::current_exception();
        }
      }
    }
  };

  const int workers = std::min<std::size_t>(worker_count(par), blocks);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> out(width);
  std::vector<double> col(blocks);
  for (int c = 0; c < width; ++c) {
    for (std::size_t b = 0; b < blocks; ++b) col[b] = block_sums[b * width + c];
    out[c] = pairwise_sum(col.data(), blocks);
  }
  return out;
}

void require_periodic(const MetricScene& s, const QuadratureGrid& grid) {
  if (!s.periodic) throw ConfigError("scene '" + s.name + "' is not periodic; integration needs a periodic chart");
  if (grid.dim != s.dim) throw ConfigError("grid dimension does not match the scene");
  if (std::abs(grid.period - s.period) > 1e-12 * s.period) throw ConfigError("grid period does not match the scene period");
  if (grid.m < 1) throw ConfigError("grid needs at least one node per axis");
}

void require_periodic_probe(const Expr& f, const MetricScene& s, const char* name) {
  const ChartPoint samples[] = {{0.3, 1.1, -0.7, 2.2}, {1.9, -0.4, 0.6, 0.1}, {-2.5, 0.8, 1.4, -1.2}};
  for (const ChartPoint& x : samples) {
    const double v = eval(f, x.data());
    for (int i = 0; i < s.dim; ++i) {
      ChartPoint y = x;
      y[i] += s.period;
      const double w = eval(f, y.data());
      if (std::abs(v - w) > 1e-9 * std::max(1.0, std::abs(v)))
        throw ConfigError(std::string("probe ") + name + " is not periodic with the scene period");
    }
  }
}

double sqrt_det_gbar(const MetricScene& s, const ChartPoint& x) {
  const double det = metric_at(s, x, 0.0).determinant();
  if (!(det > 0)) throw DomainError("ḡ is not positive definite at node " + node_text(x));
  return std::sqrt(det);
}

// Integrated-term layout for the wres report.
struct TermLayout {
  std::vector<std::pair<int, int>> products;  // (j, l) with j + l ≤ 2
  int width() const { return 3 + static_cast<int>(products.size()) + 12; }
  TermLayout() {
    for (int k = 0; k <= 2; ++k)
      for (int l = 0; l <= k; ++l) products.emplace_back(k - l, l);
  }
};

}  // namespace

std::size_t QuadratureGrid::size() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(m);
  return n;
}

double QuadratureGrid::weight() const { return std::pow(period / m, dim); }

ChartPoint QuadratureGrid::node(std::size_t index) const {
  ChartPoint x(dim);
  for (int i = dim - 1; i >= 0; --i) {
    x[i] = period * static_cast<double>(index % m) / m;
    index /= m;
  }
  return x;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

EpsSeries<double> integrate_density_series(const MetricScene& s, const QuadratureGrid& grid, const DensityProducer& density,
                                           int order, ParallelOptions par) {
  require_periodic(s, grid);
  const auto sums = grid_reduce(
      grid, order + 1,
      [&](const ChartPoint& x, double* out) {
        const EpsSeries<double> d = density(x);
        const double rho = sqrt_det_gbar(s, x);
        for (int k = 0; k <= order; ++k) out[k] = k <= d.order() ? d[k] * rho : 0.0;
      },
      par);
  EpsSeries<double> out(order, 0.0);
  for (int k = 0; k <= order; ++k) out[k] = sums[k] * grid.weight();
  return out;
}

double integrate_scalar(const QuadratureGrid& grid, const std::function<double(const ChartPoint&)>& f,
                        ParallelOptions par) {
  const auto sums = grid_reduce(grid, 1, [&](const ChartPoint& x, double* out) { out[0] = f(x); }, par);
  return sums[0] * grid.weight();
}

WresVariationReport wres_variations(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0, const Expr& f1,
                                    const Expr& f2, bool with_oracle, ParallelOptions par) {
  require_periodic(s, grid);
  if (s.dim != 4) throw ConfigError("the integrated functional needs dimension 4");
  require_periodic_probe(f0, s, "f0");
  require_periodic_probe(f1, s, "f1");
  require_periodic_probe(f2, s, "f2");

  const TermLayout layout;
  const int np = static_cast<int>(layout.products.size());
  const auto sums = grid_reduce(
      grid, layout.width(),
      [&](const ChartPoint& x, double* out) {
        const double w0 = eval(f0, x.data());
        if (w0 == 0) return;
        const PointGeometry geo = point_geometry(s, x, 2);
        const A4Series a4 = a4_density_series(geo, jet_eval(f1, x.data(), 4, kProbeDegree),
                                              jet_eval(f2, x.data(), 4, kProbeDegree));
        const VolumeSeries vol = volume_density_series(values(geo.metric.gbar), values(geo.metric.gpert), 2);
        const double base = w0 * vol.sqrt_det_gbar;
        const EpsSeries<double> dens = series_mul(a4.total, vol.closed);
        for (int k = 0; k <= 2; ++k) out[k] = base * dens[k];
        for (int p = 0; p < np; ++p) {
          const auto [j, l] = layout.products[p];
          out[3 + p] = base * a4.total[j] * vol.closed[l];
        }
        for (int k = 0; k <= 2; ++k)
          for (int c = 0; c < 4; ++c) out[3 + np + 4 * k + c] = base * a4.parts[k][c];
      },
      par);

  WresVariationReport rep;
  const double w = grid.weight();
  rep.series = EpsSeries<double>(2, 0.0);
  for (int k = 0; k <= 2; ++k) rep.series[k] = sums[k] * w;
  rep.value = rep.series[0];
  rep.first = rep.series[1];
  rep.second = 2 * rep.series[2];

  static const char* part_names[4] = {"rt/3", "a", "b", "-d/2"};
  for (int p = 0; p < np; ++p) {
    const auto [j, l] = layout.products[p];
    rep.terms[j + l].push_back({"A4[" + std::to_string(j) + "]*c[" + std::to_string(l) + "]", sums[3 + p] * w});
  }
  for (int k = 0; k <= 2; ++k)
    for (int c = 0; c < 4; ++c)
      rep.terms[k].push_back({std::string(part_names[c]) + "[" + std::to_string(k) + "]", sums[3 + np + 4 * k + c] * w});

  if (with_oracle) {
    const Probes probes{f1, f2, nullptr};
    auto integrated = [&](double eps) {
      return integrate_scalar(
          grid,
          [&](const ChartPoint& x) {
            const double w0 = eval(f0, x.data());
            if (w0 == 0) return 0.0;
            const ExactValues v = exact_all_at_eps(s, eps, x, probes);
            return w0 * v.a4 * v.sqrt_det;
          },
          par);
    };
    double h = kDefaultEpsStep;
    for (int halving = 0;; ++halving) {
      try {
        rep.oracle = extract_series_fd(integrated, 2, h);
        rep.oracle.halvings = halving;
        break;
      } catch (const DomainError&) {
        if (halving == 4) throw;
        h /= 2;
      }
    }
    rep.has_oracle = true;
  }
  return rep;
}

double phi_functional(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0, const Expr& f1, const Expr& f2,
                      int order, ParallelOptions par) {
  if (order < 0 || order > 2) throw ConfigError("φ order must be 0, 1 or 2");
  return wres_variations(s, grid, f0, f1, f2, false, par).series[order];
}

std::array<HochschildResult, 3> hochschild_residuals(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0,
                                                    const Expr& f1, const Expr& f2, const Expr& f3, ParallelOptions par) {
  using Terms = std::array<EpsSeries<double>, 4>;
  auto evaluate = [&](const QuadratureGrid& g) {
    auto series = [&](const Expr& a, const Expr& b, const Expr& c) {
      return wres_variations(s, g, a, b, c, false, par).series;
    };
    return Terms{series(mul(f0, f1), f2, f3), series(f0, mul(f1, f2), f3), series(f0, f1, mul(f2, f3)),
                 series(mul(f3, f0), f1, f2)};
  };
  QuadratureGrid coarse = grid;
  coarse.m = std::max(1, grid.m / 2);
  const Terms fine = evaluate(grid), rough = evaluate(coarse);
  std::array<HochschildResult, 3> out;
  for (int k = 0; k <= 2; ++k) {
    HochschildResult& res = out[k];
    res.order = k;
    res.phi = {fine[0][k], -fine[1][k], fine[2][k], -fine[3][k]};
    res.residual = res.phi[0] + res.phi[1] + res.phi[2] + res.phi[3];
    res.coarse = rough[0][k] - rough[1][k] + rough[2][k] - rough[3][k];
    res.refinement = std::abs(res.residual - res.coarse);
    double mass = 0;
    for (double v : res.phi) mass += std::abs(v);
    res.rounding = std::numeric_limits<double>::epsilon() * std::log2(static_cast<double>(grid.size())) * mass;
    res.error_bar = res.refinement + res.rounding;
  }
  return out;
}

HochschildResult hochschild_residual(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0, const Expr& f1,
                                     const Expr& f2, const Expr& f3, int order, ParallelOptions par) {
  if (order < 0 || order > 2) throw ConfigError("φ order must be 0, 1 or 2");
  return hochschild_residuals(s, grid, f0, f1, f2, f3, par)[order];
}

}  // namespace bimetric
