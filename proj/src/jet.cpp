#include "bimetric/jet.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace bimetric {

namespace {

// All exponent vectors of total degree d in n variables, first coordinate
// descending. The order depends only on (n, d), which keeps layouts of
// different maximum degree prefix-compatible.
void enumerate(int n, int d, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = static_cast<std::uint8_t>(d);
    out.push_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[pos] = static_cast<std::uint8_t>(e);
    enumerate(n, d - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

JetLayout::JetLayout(int dim, int degree) : dim_(dim), degree_(degree) {
  start_.push_back(0);
  for (int d = 0; d <= degree; ++d) {
    MultiIndex cur{};
    enumerate(dim, d, 0, cur, alpha_);
    start_.push_back(static_cast<int>(alpha_.size()));
  }

  for (const auto& a : alpha_) {
    double f = 1;
    for (int k = 0; k < dim; ++k)
      for (int e = 2; e <= a[k]; ++e) f *= e;
    factorial_.push_back(f);
  }

  // Leibniz: ∂^γ(ab) = Σ_{α≤γ} C(γ,α) ∂^α a ∂^{γ-α} b.
  mul_offset_.push_back(0);
  for (int g = 0; g < size(); ++g) {
    const MultiIndex& gam = alpha_[g];
    for (int a = 0; a < size(); ++a) {
      const MultiIndex& al = alpha_[a];
      bool le = true;
      double c = 1;
      MultiIndex be{};
      for (int k = 0; k < dim && le; ++k) {
        if (al[k] > gam[k]) le = false;
        else {
          be[k] = static_cast<std::uint8_t>(gam[k] - al[k]);
          c *= binom(gam[k], al[k]);
        }
      }
      if (!le) continue;
      terms_.push_back({a, index(be), c});
    }
    mul_offset_.push_back(static_cast<int>(terms_.size()));
  }

  shift_.resize(dim);
  const int lower = degree > 0 ? start_[degree] : 0;
  for (int k = 0; k < dim; ++k) {
    shift_[k].resize(lower);
    for (int i = 0; i < lower; ++i) {
      MultiIndex a = alpha_[i];
      ++a[k];
      shift_[k][i] = index(a);
    }
  }
}

int JetLayout::order(int i) const {
  int d = 0;
  while (start_[d + 1] <= i) ++d;
  return d;
}

int JetLayout::index(const MultiIndex& a) const {
  int d = 0;
  for (int k = 0; k < dim_; ++k) d += a[k];
  if (d > degree_) return -1;
  for (int i = start_[d]; i < start_[d + 1]; ++i)
    if (alpha_[i] == a) return i;
  return -1;
}

int JetLayout::index_of_coords(std::initializer_list<int> coords) const {
  MultiIndex a{};
  for (int c : coords) {
    if (c < 0 || c >= dim_) throw std::out_of_range("jet: coordinate index");
    ++a[c];
  }
  return index(a);
}

struct LayoutCache {
  std::mutex mu;
  std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> slots;

  const JetLayout& get(int dim, int degree) {
    auto& slot = slots[{dim, degree}];
    if (!slot) {
      const JetLayout* lo = degree > 0 ? &get(dim, degree - 1) : nullptr;
      slot.reset(new JetLayout(dim, degree));
      slot->lower_ = lo;
    }
    return *slot;
  }
};

const JetLayout& JetLayout::get(int dim, int degree) {
  if (dim < 1 || dim > kMaxJetDim || degree < 0 || degree > kMaxJetDegree)
    throw ConfigError("jet: unsupported dim/degree");
  static LayoutCache cache;
  std::lock_guard<std::mutex> lock(cache.mu);
  return cache.get(dim, degree);
}

}  // namespace bimetric
