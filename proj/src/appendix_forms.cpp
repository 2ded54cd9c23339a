#include "bimetric/appendix_forms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace bimetric {

namespace {

// ---- notation parser and Leibniz expansion --------------------------------

enum class AtomKind { GInv, G, H, Gamma, F1, F2 };

struct Atom {
  AtomKind kind;
  std::string idx;  // tensor letters
  std::string der;  // derivative letters
};

struct Monomial {
  double coef = 1;
  std::vector<Atom> atoms;
};
using Poly = std::vector<Monomial>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) {
      Monomial m{x.coef * y.coef, x.atoms};
      m.atoms.insert(m.atoms.end(), y.atoms.begin(), y.atoms.end());
      out.push_back(std::move(m));
    }
  return out;
}

Poly derive(const Poly& p, char k) {
  Poly out;
  for (const auto& m : p)
    for (std::size_t t = 0; t < m.atoms.size(); ++t) {
      Monomial d = m;
      d.atoms[t].der.push_back(k);
      out.push_back(std::move(d));
    }
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Poly parse() {
    Poly p = expr();
    if (i_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("form notation: " + what + " at offset " + std::to_string(i_) + " in '" + s_ + "'");
  }
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  bool starts(const char* w) const { return s_.compare(i_, std::char_traits<char>::length(w), w) == 0; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  char letter() {
    const char c = peek();
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("expected an index letter");
    ++i_;
    return c;
  }
  std::string letters(char close) {
    std::string out(1, letter());
    while (peek() == ',') {
      ++i_;
      out.push_back(letter());
    }
    expect(close);
    return out;
  }

  Poly expr() {
    Poly out;
    bool first = true;
    while (true) {
      double sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++i_;
      } else if (!first) {
        break;
      }
      Poly t = product();
      for (auto& m : t) m.coef *= sign;
      out.insert(out.end(), t.begin(), t.end());
      first = false;
      if (peek() != '+' && peek() != '-') break;
    }
    return out;
  }

  Poly product() {
    Poly acc{Monomial{}};
    bool any = false;
    while (true) {
      const char c = peek();
      if (c == '\0' || c == '+' || c == '-' || c == ')' || c == ']') break;
      acc = multiply(acc, factor());
      any = true;
    }
    if (!any) fail("empty product");
    return acc;
  }

  Poly group() {
    const char open = peek();
    if (open != '(' && open != '[') fail("expected a group");
    ++i_;
    Poly p = expr();
    expect(open == '(' ? ')' : ']');
    return p;
  }

  Poly factor() {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      double v = number();
      if (peek() == '/') {
        ++i_;
        v /= number();
      }
      return Poly{Monomial{v, {}}};
    }
    if (c == '(' || c == '[') return group();
    if (starts("d{")) {
      i_ += 2;
      const std::string ks = letters('}');
      Poly p = group();
      for (char k : ks) p = derive(p, k);
      return p;
    }
    Atom a;
    if (starts("gi(")) {
      i_ += 3;
      a = {AtomKind::GInv, two_letters(), ""};
    } else if (starts("g(")) {
      i_ += 2;
      a = {AtomKind::G, two_letters(), ""};
    } else if (starts("h(")) {
      i_ += 2;
      a = {AtomKind::H, two_letters(), ""};
    } else if (starts("G(")) {
      i_ += 2;
      std::string idx(1, letter());
      expect(';');
      idx += two_letters();
      a = {AtomKind::Gamma, idx, ""};
    } else if (starts("f1") || starts("f2")) {
      a = {s_[i_ + 1] == '1' ? AtomKind::F1 : AtomKind::F2, "", ""};
      i_ += 2;
    } else {
      fail("unknown factor");
    }
    if (peek() == '{') {
      ++i_;
      a.der = letters('}');
    }
    return Poly{Monomial{1, {a}}};
  }

  std::string two_letters() {
    std::string out(1, letter());
    expect(',');
    out.push_back(letter());
    expect(')');
    return out;
  }

  double number() {
    const std::size_t start = i_;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') ++i_;
    return std::stod(s_.substr(start, i_ - start));
  }
};

const Poly& expand(const std::string& text) {
  static std::mutex mu;
  static std::unordered_map<std::string, Poly> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(text);
  if (it == cache.end()) it = cache.emplace(text, Parser(text).parse()).first;
  return it->second;
}

// ---- dense contraction -----------------------------------------------------

struct Factor {
  std::string letters;  // distinct, unbound
  std::vector<double> v;  // letters[0] fastest
};

int power(int n, std::size_t k) {
  int p = 1;
  for (std::size_t i = 0; i < k; ++i) p *= n;
  return p;
}

double derivative(const Jet& j, const std::vector<int>& coords) {
  if (coords.empty()) return j.value();
  if (j.is_plain()) return 0.0;
  MultiIndex a{};
  for (int c : coords) ++a[c];
  const int i = j.layout()->index(a);
  if (i < 0) throw ConfigError("form needs a derivative beyond the stored jet degree");
  return j[i];
}

class Contractor {
 public:
  Contractor(const AppendixPoint& p, const std::map<char, int>& bound) : p_(p), n_(p.n), bound_(bound) {}

  double monomial(const Monomial& m) const {
    std::vector<Factor> fs;
    double scalar = m.coef;
    for (const Atom& a : m.atoms) {
      Factor f = build(a);
      if (f.letters.empty()) {
        scalar *= f.v[0];
      } else {
        fs.push_back(std::move(f));
      }
      if (scalar == 0) return 0;
    }
    while (!fs.empty()) {
      // sum out letters private to one factor
      for (std::size_t i = 0; i < fs.size(); ++i) fs[i] = reduce(fs, i);
      std::vector<Factor> rest;
      for (auto& f : fs) {
        if (f.letters.empty()) {
          scalar *= f.v[0];
        } else {
          rest.push_back(std::move(f));
        }
      }
      fs = std::move(rest);
      if (fs.size() < 2) {
        if (!fs.empty()) throw std::logic_error("contraction left an open index");
        break;
      }
      // merge the pair with the smallest union, preferring shared letters
      std::size_t bi = 0, bj = 1, best = SIZE_MAX;
      for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
          std::string u = fs[i].letters;
          bool shared = false;
          for (char c : fs[j].letters) {
            if (u.find(c) == std::string::npos) {
              u.push_back(c);
            } else {
              shared = true;
            }
          }
          const std::size_t cost = 2 * u.size() + (shared ? 0 : 1);
          if (cost < best) {
            best = cost;
            bi = i;
            bj = j;
          }
        }
      Factor merged = merge(fs, bi, bj);
      fs.erase(fs.begin() + bj);
      fs[bi] = std::move(merged);
    }
    return scalar;
  }

 private:
  const AppendixPoint& p_;
  int n_;
  const std::map<char, int>& bound_;

  const Jet& jet(const Atom& a, const int* v) const {
    switch (a.kind) {
      case AtomKind::GInv: return p_.gbar_inv(v[0], v[1]);
      case AtomKind::G: return p_.gbar(v[0], v[1]);
      case AtomKind::H: return p_.gpert(v[0], v[1]);
      case AtomKind::Gamma: return p_.gamma[v[0]](v[1], v[2]);
      case AtomKind::F1: return p_.f1;
      case AtomKind::F2: return p_.f2;
    }
    throw std::logic_error("atom kind");
  }

  Factor build(const Atom& a) const {
    Factor f;
    const std::string all = a.idx + a.der;
    for (char c : all)
      if (!bound_.count(c) && f.letters.find(c) == std::string::npos) f.letters.push_back(c);
    const int size = power(n_, f.letters.size());
    f.v.assign(size, 0.0);
    std::vector<int> val(128, 0);
    for (const auto& [c, v] : bound_) val[static_cast<unsigned char>(c)] = v;
    int idx[3] = {0, 0, 0};
    std::vector<int> coords(a.der.size());
    for (int e = 0; e < size; ++e) {
      int r = e;
      for (char c : f.letters) {
        val[static_cast<unsigned char>(c)] = r % n_;
        r /= n_;
      }
      for (std::size_t t = 0; t < a.idx.size(); ++t) idx[t] = val[static_cast<unsigned char>(a.idx[t])];
      for (std::size_t t = 0; t < a.der.size(); ++t) coords[t] = val[static_cast<unsigned char>(a.der[t])];
      f.v[e] = derivative(jet(a, idx), coords);
    }
    return f;
  }

  // Letters of fs[i] that appear in no other factor are summed out.
  Factor reduce(const std::vector<Factor>& fs, std::size_t i) const {
    const Factor& f = fs[i];
    std::string keep;
    for (char c : f.letters) {
      bool elsewhere = false;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != i && fs[j].letters.find(c) != std::string::npos) elsewhere = true;
      if (elsewhere) keep.push_back(c);
    }
    if (keep.size() == f.letters.size()) return f;
    Factor out{keep, std::vector<double>(power(n_, keep.size()), 0.0)};
    for (std::size_t e = 0; e < f.v.size(); ++e) out.v[project(f.letters, e, keep)] += f.v[e];
    return out;
  }

  Factor merge(const std::vector<Factor>& fs, std::size_t i, std::size_t j) const {
    const Factor &a = fs[i], &b = fs[j];
    std::string u = a.letters;
    for (char c : b.letters)
      if (u.find(c) == std::string::npos) u.push_back(c);
    std::string keep;
    for (char c : u) {
      bool elsewhere = false;
      for (std::size_t k = 0; k < fs.size(); ++k)
        if (k != i && k != j && fs[k].letters.find(c) != std::string::npos) elsewhere = true;
      if (elsewhere) keep.push_back(c);
    }
    Factor out{keep, std::vector<double>(power(n_, keep.size()), 0.0)};
    const int size = power(n_, u.size());
    for (int e = 0; e < size; ++e) {
      const double x = a.v[project(u, e, a.letters)];
      if (x == 0) continue;
      out.v[project(u, e, keep)] += x * b.v[project(u, e, b.letters)];
    }
    return out;
  }

  // Index into a tensor over `to` of the assignment encoded by e over `from`.
  int project(const std::string& from, std::size_t e, const std::string& to) const {
    int digits[128];
    for (char c : from) {
      digits[static_cast<unsigned char>(c)] = static_cast<int>(e % n_);
      e /= n_;
    }
    int out = 0, scale = 1;
    for (char c : to) {
      out += digits[static_cast<unsigned char>(c)] * scale;
      scale *= n_;
    }
    return out;
  }
};

double evaluate_text(const std::string& text, const AppendixPoint& p, const std::map<char, int>& bound) {
  const Contractor c(p, bound);
  double sum = 0;
  for (const Monomial& m : expand(text)) sum += c.monomial(m);
  return sum;
}

// ---- transcriptions --------------------------------------------------------
// Each string is one printed summand, rewritten in the notation above with
// its display row and position inside the coefficient.

const std::vector<AppendixForm> kForms = {
    {"r0", "", {
        // row 1, summand 1
        {1, 1, "gi(j,l)d{k}(G(k;j,l))"},
        // row 1, summand 2
        {1, 2, "+gi(j,l)G(a;j,l)G(k;k,a)"},
        // row 1, summand 3
        {1, 3, "-gi(j,l)d{j}(G(k;k,l))"},
        // row 1, summand 4
        {1, 4, "+gi(j,l)G(a;k,l)G(k;j,a)"},
    }},
    {"r1", "", {
        // row 1, summand 1
        {1, 1, "-d{k}(G(k;j,l))gi(j,L)h(L,S)gi(S,l)"},
        // row 1, summand 2
        {1, 2, "+1/2gi(j,l)d{k}(gi(k,r))(h(j,r){l}+h(l,r){j}-h(j,l){r})"},
        // row 1, summand 3
        {1, 3, "+1/2gi(j,l)gi(k,r)(h(j,r){k,l}+h(l,r){k,j}-h(j,l){k,r})"},
        // row 2, summand 4
        {2, 4, "-1/2gi(j,l)d{k}(gi(k,L)h(L,S)gi(S,r))(gi(j,r){l}+gi(l,r){j}-gi(j,l){r})"},
        // row 2, summand 5
        {2, 5, "-1/2gi(j,l)gi(k,L)h(L,S)gi(S,r)(gi(j,r){k,l}+gi(l,r){k,j}-gi(j,l){k,r})"},
        // row 3, summand 6
        {3, 6, "-gi(j,L)h(L,S)gi(S,l)G(a;j,l)G(k;k,a)"},
        // row 3, summand 7
        {3, 7,
         "+1/2gi(j,l)G(a;j,l)[gi(k,r)(h(k,r){a}+h(a,r){k}-h(k,a){r})-gi(k,L)h(L,S)gi(S,r)(gi(k,r){a}+"
         "gi(a,r){k}-gi(k,a){r})]"},
        // row 4, summand 8
        {4, 8,
         "+1/2gi(j,l)[gi(a,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(a,L)h(L,S)gi(S,r)(gi(j,r){l}+gi(l,r){j}-"
         "gi(j,l){r})]G(k;k,a)"},
        // row 4, summand 9
        {4, 9, "+gi(j,L)h(L,S)gi(S,l)d{j}(G(k;k,l))"},
        // row 5, summand 10
        {5, 10, "-1/2gi(j,l)d{k}(gi(k,r))(h(k,r){l}+h(l,r){k}-h(k,l){r})"},
        // row 5, summand 11
        {5, 11, "-1/2gi(j,l)gi(k,r)(h(k,r){j,l}+h(l,r){j,k}-h(k,l){j,r})"},
        // row 5, summand 12
        {5, 12, "+1/2gi(j,l)d{j}(gi(k,L)h(L,S)gi(S,r))(gi(k,r){l}+gi(l,r){k}-gi(k,l){r})"},
        // row 6, summand 13
        {6, 13, "+1/2gi(j,l)gi(k,L)h(L,S)gi(S,r)(gi(k,r){j,l}+gi(l,r){j,k}-gi(k,l){j,r})"},
        // row 6, summand 14
        {6, 14, "+gi(j,L)h(L,S)gi(S,l)G(a;k,l)G(k;j,a)"},
        // row 7, summand 15
        {7, 15,
         "-1/2gi(j,l)[gi(a,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(a,L)h(L,S)gi(S,r)(gi(k,r){l}+gi(l,r){k}-"
         "gi(k,l){r})]G(k;j,a)"},
        // row 8, summand 16
        {8, 16,
         "-1/2gi(j,l)G(a;k,l)[gi(k,r)(h(j,r){a}+h(a,r){j}-h(j,a){r})-gi(k,L)h(L,S)gi(S,r)(gi(j,r){a}+"
         "gi(a,r){j}-gi(j,a){r})]"},
    }},
    {"r2", "", {
        // row 1, summand 1
        {1, 1, "d{k}(G(k;j,l))gi(j,L)h(L,S)gi(S,a)h(a,b)gi(b,l)"},
        // row 1, summand 2
        {1, 2, "-1/2gi(j,l)d{k}(gi(k,L)h(L,S)gi(S,r))(h(j,r){l}+h(l,r){j}-h(j,l){r})"},
        // row 1, summand 3
        {1, 3, "-1/2gi(j,l)gi(k,L)h(L,S)gi(S,r)(h(j,r){k,l}+h(l,r){k,j}-h(j,l){k,r})"},
        // row 2, summand 4
        {2, 4,
         "+1/2gi(j,l)[d{k}(gi(k,L)h(L,S)gi(S,a)h(a,b)gi(b,r))(gi(j,r){l}+gi(l,r){j}-gi(j,l){r})+gi(k,L)"
         "h(L,S)gi(S,a)h(a,b)gi(b,r)(h(j,r){k,l}+h(l,r){k,j}-h(j,l){k,r})]"},
        // row 3, summand 5
        {3, 5,
         "-1/2gi(j,L)h(L,S)gi(S,l)[d{k}(gi(k,r))(h(j,r){l}+h(l,r){j}-h(j,l){r})+gi(k,r)(h(j,r){k,l}+h(l,r)"
         "{k,j}-h(j,l){k,r})+g(j,l)d{k}(gi(k,L)h(L,S)gi(S,r))(gi(j,r){l}+gi(l,r){j}-gi(j,l){r})-g(j,l)"
         "gi(k,L)h(L,S)gi(S,r)(h(j,r){k,l}+h(l,r){k,j}-h(j,l){k,r})]"},
        // row 5, summand 6
        {5, 6, "+gi(j,L)h(L,S)gi(S,a)h(a,b)gi(b,l)G(a;j,l)G(k;k,a)"},
        // row 5, summand 7
        {5, 7,
         "+1/2g(j,l)[-gi(a,L)h(L,S)gi(S,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})+gi(a,L)h(L,S)gi(S,k)h(k,b)"
         "gi(b,r)(gi(j,r){l}+gi(l,r){j}-gi(j,l){r})]G(k;k,a)"},
        // row 6, summand 8
        {6, 8,
         "+1/2g(j,l)G(a;j,l)[-gi(k,L)h(L,S)gi(S,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})+gi(k,L)h(L,S)gi(S,m)"
         "h(m,b)gi(b,r)(gi(k,r){l}+gi(l,r){k}-gi(k,l){r})]"},
        // row 7, summand 9
        {7, 9,
         "+1/4g(j,l)[gi(k,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(k,L)h(L,S)gi(S,r)(gi(k,r){l}+gi(l,r){k}-"
         "gi(k,l){r})][gi(a,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(a,L)h(L,S)gi(S,r)(gi(j,r){l}+gi(l,r){j}-"
         "gi(j,l){r})]"},
        // row 8, summand 10
        {8, 10,
         "-1/2g(j,L)h(L,S)gi(S,l)G(a;j,l)[gi(a,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(a,L)h(L,S)gi(S,r)"
         "(gi(j,r){l}+gi(l,r){j}-gi(j,l){r})]"},
        // row 9, summand 11
        {9, 11,
         "-1/2g(j,L)h(L,S)gi(S,l)[gi(k,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(k,L)h(L,S)gi(S,r)(gi(k,r){l}+"
         "gi(l,r){k}-gi(k,l){r})]G(k;k,a)"},
        // row 11, summand 12
        {11, 12, "+1/2gi(j,l)d{k}(gi(k,L)h(L,S)gi(S,r))(h(k,r){l}+h(l,r){k}-h(k,l){r})"},
        // row 11, summand 13
        {11, 13, "+1/2gi(j,l)gi(k,L)h(L,S)gi(S,r)(h(k,r){j,l}+h(l,r){j,k}-h(k,l){j,r})"},
        // row 12, summand 14
        {12, 14, "-1/2gi(j,l)d{k}(gi(k,L)h(L,S)gi(S,a)h(a,b)gi(b,r))(gi(k,r){l}+gi(l,r){k}-gi(k,l){r})"},
        // row 12, summand 15
        {12, 15, "-1/2gi(j,l)gi(k,L)h(L,S)gi(S,a)h(a,b)gi(b,r)(gi(k,r){j,l}+gi(l,r){j,k}-gi(k,l){j,r})"},
        // row 13, summand 16
        {13, 16, "-gi(j,L)h(L,S)gi(S,a)h(a,b)gi(b,l)d{j}(G(k;k,l))"},
        // row 13, summand 17
        {13, 17,
         "+1/2g(j,L)h(L,S)gi(S,l)[d{j}(gi(k,r))(h(k,r){l}+h(l,r){k}-h(k,l){r})+gi(k,r)(h(k,r){j,l}+h(l,r)"
         "{j,k}-h(k,l){j,r})-d{j}(gi(k,L)h(L,S)gi(S,r))(gi(k,r){l}+gi(l,r){k}-gi(k,l){r})-gi(k,L)h(L,S)"
         "gi(S,r)(gi(k,r){j,l}+gi(l,r){j,k}-gi(k,l){j,r})]"},
        // row 15, summand 18
        {15, 18, "-gi(j,L)h(L,S)gi(S,a)h(a,b)gi(b,l)G(a;k,l)G(k;j,a)"},
        // row 15, summand 19
        {15, 19,
         "-1/2g(j,l)G(a;k,l)[-gi(k,L)h(L,S)gi(S,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})+gi(a,L)h(L,S)gi(S,m)"
         "h(m,b)gi(b,r)(gi(k,r){l}+gi(l,r){k}-gi(k,l){r})]"},
        // row 16, summand 20
        {16, 20,
         "-1/2g(j,l)[-gi(a,L)h(L,S)gi(S,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})+gi(a,L)h(L,S)gi(S,m)h(m,b)"
         "gi(b,r)(gi(k,r){l}+gi(l,r){k}-gi(k,l){r})]G(k;k,l)"},
        // row 17, summand 21
        {17, 21,
         "+1/4g(j,l)[gi(a,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(a,L)h(L,S)gi(S,r)(gi(j,r){l}+gi(l,r){j}-"
         "gi(j,l){r})][gi(k,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(k,L)h(L,S)gi(S,r)(gi(j,r){l}+gi(l,r){j}-"
         "gi(j,l){r})]"},
        // row 18, summand 22
        {18, 22,
         "+1/2g(j,L)h(L,S)gi(S,l)G(a;k,l)[gi(k,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(k,L)h(L,S)gi(S,r)"
         "(gi(j,r){l}+gi(l,r){j}-gi(j,l){r})]"},
        // row 19, summand 23
        {19, 23,
         "+1/2g(j,L)h(L,S)gi(S,l)[gi(a,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(a,L)h(L,S)gi(S,r)(gi(k,r){l}+"
         "gi(l,r){k}-gi(k,l){r})]G(k;j,a)"},
    }},
    {"a0", "", {
        // row 1, summand 1
        {1, 1, "-gi(a,b)(d{a,b}(f1{j}f2{l}gi(j,l))-G(k;a,b)d{k}(f1{j}f2{l}gi(j,l)))"},
    }},
    {"a1", "", {
        // row 1, summand 1
        {1, 1, "gi(a,b)d{a,b}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,l))"},
        // row 1, summand 2
        {1, 2, "-gi(a,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,l))"},
        // row 2, summand 3
        {2, 3,
         "+1/2gi(a,b)[gi(k,l)(h(a,l){b}+h(b,l){a}-h(a,b){l})-gi(k,L)h(L,S)gi(S,l)(gi(a,l){b}+gi(b,l){a}-"
         "gi(a,b){l})]d{k}(f1{j}f2{l}gi(j,l))"},
        // row 3, summand 4
        {3, 4, "+gi(a,L)h(L,S)gi(S,b)d{a,b}(f1{j}f2{l}gi(j,l))"},
        // row 3, summand 5
        {3, 5, "-gi(a,L)h(L,S)gi(S,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,l))"},
    }},
    {"a2", "", {
        // row 1, summand 1
        {1, 1, "gi(a,L)h(L,S)gi(S,l)h(l,j)gi(j,b)d{a,b}(f1{j}f2{l}gi(j,l))"},
        // row 1, summand 2
        {1, 2, "+gi(a,b)d{a,b}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,a)h(a,b)gi(b,l))"},
        // row 1, summand 3
        {1, 3, "-gi(a,L)h(L,S)gi(S,l)h(l,j)gi(j,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,l))"},
        // row 2, summand 4
        {2, 4, "-gi(a,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,a)h(a,b)gi(b,l))"},
        // row 2, summand 5
        {2, 5,
         "+1/2gi(a,b)[-gi(k,L)h(L,S)gi(S,l)(h(a,l){b}+h(b,l){a}-h(a,b){l})+gi(k,L)h(L,S)gi(S,i)h(i,j)"
         "gi(j,l)(gi(a,l){b}+gi(b,l){a}-gi(a,b){l})]d{k}(f1{j}f2{l}gi(j,l))"},
        // row 3, summand 6
        {3, 6, "-gi(a,L)h(L,S)gi(S,b)d{a,b}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,l))"},
        // row 4, summand 7
        {4, 7, "-gi(a,L)h(L,S)gi(S,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,l))"},
        // row 4, summand 8
        {4, 8,
         "+1/2gi(a,L)h(L,S)gi(S,b)[gi(k,l)(h(a,l){b}+h(b,l){a}-h(a,b){l})-gi(k,L)h(L,S)gi(S,l)(gi(a,l){b}+"
         "gi(b,l){a}-gi(a,b){l})]d{k}(f1{j}f2{l}gi(j,l))"},
        // row 5, summand 9
        {5, 9,
         "+1/2gi(a,b)[gi(k,l)(h(a,l){b}+h(b,l){a}-h(a,b){l})-gi(k,L)h(L,S)gi(S,l)(gi(a,l){b}+gi(b,l){a}-"
         "gi(a,b){l})]d{k}(f1{j}f2{l}gi(a,L)h(L,S)gi(S,l))"},
    }},
    {"b0", "", {
        // row 1, summand 1
        {1, 1, "(f1{l,b}-f1{k}G(k;b,l))(f2{p,q}-f2{m}G(m;p,q))gi(b,p)gi(l,q)"},
    }},
    {"b1", "", {
        // row 1, summand 1
        {1, 1, "-f1{l,b}f2{p,q}(gi(b,L)h(L,S)gi(S,p)gi(l,q)+gi(b,p)gi(l,L)h(L,S)gi(S,q))"},
        // row 1, summand 2
        {1, 2, "+f1{l,b}f2{m}G(m;p,q)(gi(b,L)h(L,S)gi(S,p)gi(l,q)+gi(b,p)gi(l,L)h(L,S)gi(S,q))"},
        // row 2, summand 3
        {2, 3, "+f1{k}G(k;b,l)f2{p,q}(gi(b,L)h(L,S)gi(S,p)gi(l,q)+gi(b,p)gi(l,L)h(L,S)gi(S,q))"},
        // row 2, summand 4
        {2, 4, "+f1{k}G(k;b,l)f2{m}G(m;p,q)(gi(b,L)h(L,S)gi(S,p)gi(l,q)+gi(b,p)gi(l,L)h(L,S)gi(S,q))"},
        // row 3, summand 5
        {3, 5,
         "-1/2f1{l,b}f2{m}[gi(m,l)(h(p,l){q}+h(q,l){p}-h(p,q){l})-gi(m,L)h(L,S)gi(S,l)(gi(p,l){q}+gi(q,l)"
         "{p}-gi(p,q){l})]gi(b,p)gi(l,q)"},
        // row 4, summand 6
        {4, 6,
         "-1/2f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(gi(b,j){l}+gi(l,j){b}-"
         "gi(b,l){j})]f2{p,q}gi(b,p)gi(l,q)"},
        // row 5, summand 7
        {5, 7,
         "+1/2f1{k}G(k;b,l)f2{m}[gi(m,l)(h(p,l){q}+h(q,l){p}-h(p,q){l})-gi(m,L)h(L,S)gi(S,l)(gi(p,l){q}+"
         "gi(q,l){p}-gi(p,q){l})]gi(b,p)gi(l,q)"},
        // row 6, summand 8
        {6, 8,
         "+1/2f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(gi(b,j){l}+gi(l,j){b}-"
         "gi(b,l){j})]f2{p,q}f2{m}G(m;p,q)gi(b,p)gi(l,q)"},
    }},
    {"b2", "", {
        // row 1, summand 1
        {1, 1, "(f1{l,b}-f1{k}G(k;b,l))(f2{p,q}-f2{m}G(m;p,q))gi(b,L)h(L,S)gi(S,a)h(a,c)gi(c,p)gi(l,q)"},
        // row 1, summand 2
        {1, 2, "+(f1{l,b}-f1{k}G(k;b,l))(f2{p,q}-f2{m}G(m;p,q))gi(b,p)gi(l,L)h(L,S)gi(S,a)h(a,c)gi(c,q)"},
        // row 2, summand 3
        {2, 3,
         "-1/2f1{k}[-gi(k,L)h(L,S)gi(S,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})+gi(k,L)h(L,S)gi(S,a)h(a,c)gi(c,j)"
         "(gi(p,j){l}+gi(l,j){b}-gi(l,b){j})](f2{p,q}-f2{m}G(m;p,q))gi(b,p)gi(l,q)"},
        // row 3, summand 4
        {3, 4,
         "-1/2(f1{l,b}-f1{k}G(k;b,l))f2{m}[-gi(m,L)h(L,S)gi(S,l)(h(p,l){q}+h(q,l){p}-h(p,q){l})+gi(m,L)"
         "h(L,S)gi(S,a)h(a,c)gi(c,l)(gi(p,l){q}+gi(q,l){p}-gi(p,q){l})]gi(b,p)gi(l,q)"},
        // row 5, summand 5
        {5, 5, "+(f1{l,b}-f1{k}G(k;b,l))(f2{p,q}-f2{m}G(m;p,q))gi(b,L)h(L,S)gi(S,p)gi(l,L)h(L,S)gi(S,q)"},
        // row 5, summand 6
        {5, 6,
         "+1/2f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(gi(b,j){l}+gi(l,j){b}-"
         "gi(b,l){j})](f2{p,q}-f2{m}G(m;p,q))(gi(b,L)h(L,S)gi(S,p)gi(l,q)+gi(b,p)gi(l,L)h(L,S)gi(S,q))"},
        // row 7, summand 7
        {7, 7,
         "+1/2(f1{l,b}-f1{k}G(k;b,l))f2{m}[gi(m,l)(h(p,l){q}+h(q,l){p}-h(p,q){l})-gi(m,L)h(L,S)gi(S,l)"
         "(gi(p,l){q}+gi(q,l){p}-gi(p,q){l})](gi(b,L)h(L,S)gi(S,p)gi(l,q)+gi(b,p)gi(l,L)h(L,S)gi(S,q))"},
        // row 8, summand 8
        {8, 8,
         "+1/4f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(gi(b,j){l}+gi(l,j){b}-"
         "gi(b,l){j})]f2{m}[gi(m,l)(h(p,l){q}+h(q,l){p}-h(p,q){l})-gi(m,L)h(L,S)gi(S,l)(gi(p,l){q}+gi(q,l)"
         "{p}-gi(p,q){l})]gi(b,p)gi(l,q)"},
    }},
    {"d0", "", {
        // row 1, summand 1
        {1, 1, "[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]"},
    }},
    {"d1", "", {
        // row 1, summand 1
        {1, 1, "[-gi(a,L)h(L,S)gi(S,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 1, summand 2
        {1, 2, "+[-gi(a,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,L)h(L,S)gi(S,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 2, summand 3
        {2, 3,
         "-1/2[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})]gi(p,q)[gi(k,r)(h(p,k){q}+h(q,k){p}-h(p,q){k})-gi(r,L)h(L,S)"
         "gi(S,k)(gi(p,k){q}+gi(q,k){p}-gi(p,q){k})]f2{r}"},
        // row 3, summand 4
        {3, 4,
         "-1/2gi(a,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(gi(l,k){b}+gi(b,k){l}-"
         "gi(l,b){k})]f1{l}[gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]"},
    }},
    {"d2", "", {
        // row 1, summand 1
        {1, 1, "[gi(a,L)h(L,S)gi(S,c)h(c,m)gi(m,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 1, summand 2
        {1, 2, "+[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,L)h(L,S)gi(S,c)h(c,m)gi(m,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 2, summand 3
        {2, 3,
         "-1/2gi(a,b)[-gi(l,L)h(L,S)gi(S,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})+gi(l,L)h(L,S)gi(S,c)h(c,m)"
         "gi(m,b)(gi(a,k){b}+gi(b,k){a}-gi(a,b){k})]f1{l}[gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 3, summand 4
        {3, 4,
         "-1/2[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})]gi(p,q)[-gi(r,L)h(L,S)gi(S,k)(h(p,k){q}+h(q,k){p}-h(p,q){k})"
         "+gi(r,L)h(L,S)gi(S,c)h(c,m)gi(m,q)(gi(p,k){q}+gi(q,k){p}-gi(p,q){k})]f2{r}"},
        // row 4, summand 5
        {4, 5,
         "+1/2gi(a,L)h(L,S)gi(S,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(gi(l,k){b}+"
         "gi(b,k){l}-gi(l,b){k})]f1{l}[gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 5, summand 6
        {5, 6,
         "+1/2[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})]gi(p,L)h(L,S)gi(S,q)[gi(k,r)(h(p,k){q}+h(q,k){p}-h(p,q){k})-"
         "gi(r,L)h(L,S)gi(S,k)(gi(p,k){q}+gi(q,k){p}-gi(p,q){k})]f2{r}"},
        // row 7, summand 7
        {7, 7, "+[gi(a,L)h(L,S)gi(S,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,L)h(L,S)gi(S,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 8, summand 8
        {8, 8,
         "+1/2gi(a,L)h(L,S)gi(S,b)(f1{a,b}-G(l;a,b)f1{l})gi(p,q)[gi(k,r)(h(p,k){q}+h(q,k){p}-h(p,q){k})-"
         "gi(r,L)h(L,S)gi(S,k)(gi(p,k){q}+gi(q,k){p}-gi(p,q){k})]f2{r}"},
        // row 9, summand 9
        {9, 9,
         "+1/2gi(a,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(gi(l,k){b}+gi(b,k){l}-"
         "gi(l,b){k})][gi(p,L)h(L,S)gi(S,q)(f2{p,q}-G(r;p,q)f2{r})]"},
        // row 10, summand 10
        {10, 10,
         "+1/4gi(a,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(gi(l,k){b}+gi(b,k){l}-"
         "gi(l,b){k})]gi(p,q)[-gi(r,L)h(L,S)gi(S,k)(h(p,k){q}+h(q,k){p}-h(p,q){k})+gi(r,L)h(L,S)gi(S,c)"
         "h(c,m)gi(m,q)(gi(p,k){q}+gi(q,k){p}-gi(p,q){k})]f2{r}"},
    }},
    {"G1", "kij", {
        // row 1, summand 1
        {1, 1, "1/2[gi(k,l)(h(i,l){j}+h(j,l){i}-h(i,j){l})-gi(k,L)h(L,S)gi(S,l)(g(i,l){j}+g(j,l){i}-g(i,j){l})]"},
    }},
    {"G2", "kij", {
        // row 2, summand 1
        {2, 1,
         "1/2[-gi(k,l)h(L,S)gi(S,l)(h(i,l){j}+h(j,l){i}-h(i,j){l})+gi(k,L)h(L,S)gi(S,a)h(a,b)gi(b,l)"
         "(g(i,l){j}+g(j,l){i}-g(i,j){l})]"},
    }},
};

// Replacements of printed summands. Only summands that fail the index audit
// are replaced, each by the term of the order-by-order expansion it stands
// for; changes_sign marks replacements whose overall sign differs.
const std::vector<FormFix> kFixes = {
    {"G2.1", "G2", 1, "index-placement", false,
     "1/2[-gi(k,L)h(L,S)gi(S,l)(h(i,l){j}+h(j,l){i}-h(i,j){l})+gi(k,a)h(a,b)gi(b,c)h(c,m)gi(m,l)"
     "(g(i,l){j}+g(j,l){i}-g(i,j){l})]",
     "first factor reads ḡ^{kl} where the sandwich ḡ^{kλ}g̿_{λσ}ḡ^{σl} is meant"},
    {"r1.4", "r1", 4, "index-placement", false,
     "-1/2gi(j,l)d{k}(gi(k,L)h(L,S)gi(S,r))(g(j,r){l}+g(l,r){j}-g(j,l){r})",
     "upper-index metric derivatives lowered"},
    {"r1.5", "r1", 5, "index-placement", false,
     "-1/2gi(j,l)gi(k,L)h(L,S)gi(S,r)(g(j,r){k,l}+g(l,r){k,j}-g(j,l){k,r})",
     "upper-index metric derivatives lowered"},
    {"r1.7", "r1", 7, "index-placement", false,
     "+1/2gi(j,l)G(a;j,l)[gi(k,r)(h(k,r){a}+h(a,r){k}-h(k,a){r})-gi(k,L)h(L,S)gi(S,r)(g(k,r){a}+"
     "g(a,r){k}-g(k,a){r})]",
     "upper-index metric derivatives lowered"},
    {"r1.8", "r1", 8, "index-placement", false,
     "+1/2gi(j,l)[gi(a,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(a,L)h(L,S)gi(S,r)(g(j,r){l}+g(l,r){j}-"
     "g(j,l){r})]G(k;k,a)",
     "upper-index metric derivatives lowered"},
    {"r1.10", "r1", 10, "derivative-letter", false,
     "-1/2gi(j,l)d{j}(gi(k,r))(h(k,r){l}+h(l,r){k}-h(k,l){r})",
     "∂_k on ḡ^{kr} reads ∂_j, as in the neighbouring ∂_j terms"},
    {"r1.12", "r1", 12, "index-placement", false,
     "+1/2gi(j,l)d{j}(gi(k,L)h(L,S)gi(S,r))(g(k,r){l}+g(l,r){k}-g(k,l){r})",
     "upper-index metric derivatives lowered"},
    {"r1.13", "r1", 13, "index-placement", false,
     "+1/2gi(j,l)gi(k,L)h(L,S)gi(S,r)(g(k,r){j,l}+g(l,r){j,k}-g(k,l){j,r})",
     "upper-index metric derivatives lowered"},
    {"r1.15", "r1", 15, "index-placement", false,
     "-1/2gi(j,l)[gi(a,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(a,L)h(L,S)gi(S,r)(g(k,r){l}+g(l,r){k}-"
     "g(k,l){r})]G(k;j,a)",
     "upper-index metric derivatives lowered"},
    {"r1.16", "r1", 16, "index-placement", false,
     "-1/2gi(j,l)G(a;k,l)[gi(k,r)(h(j,r){a}+h(a,r){j}-h(j,a){r})-gi(k,L)h(L,S)gi(S,r)(g(j,r){a}+"
     "g(a,r){j}-g(j,a){r})]",
     "upper-index metric derivatives lowered"},
    {"r2.4", "r2", 4, "index-placement,second-derivative", false,
     "+1/2gi(j,l)[d{k}(gi(k,L)h(L,S)gi(S,c)h(c,m)gi(m,r))(g(j,r){l}+g(l,r){j}-g(j,l){r})+gi(k,L)"
     "h(L,S)gi(S,c)h(c,m)gi(m,r)(g(j,r){k,l}+g(l,r){k,j}-g(j,l){k,r})]",
     "upper-index metric derivatives lowered; the second part differentiates ḡ, not g̿"},
    {"r2.5", "r2", 5, "index-placement,stray-factor,sign", true,
     "-1/2gi(j,L)h(L,S)gi(S,l)[d{k}(gi(k,r))(h(j,r){l}+h(l,r){j}-h(j,l){r})+gi(k,r)(h(j,r){k,l}+"
     "h(l,r){k,j}-h(j,l){k,r})-d{k}(gi(k,u)h(u,v)gi(v,r))(g(j,r){l}+g(l,r){j}-g(j,l){r})-gi(k,u)"
     "h(u,v)gi(v,r)(g(j,r){k,l}+g(l,r){k,j}-g(j,l){k,r})]",
     "stray ḡ_{jl} factors dropped, the third part takes its minus sign and the fourth differentiates ḡ"},
    {"r2.6", "r2", 6, "index-collision", false,
     "+gi(j,L)h(L,S)gi(S,c)h(c,m)gi(m,l)G(a;j,l)G(k;k,a)",
     "the sandwich reuses α"},
    {"r2.7", "r2", 7, "index-placement,index-collision", false,
     "+1/2gi(j,l)[-gi(a,L)h(L,S)gi(S,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})+gi(a,u)h(u,v)gi(v,w)h(w,z)"
     "gi(z,r)(g(j,r){l}+g(l,r){j}-g(j,l){r})]G(k;k,a)",
     "ḡ_{jl} read as ḡ^{jl}; the sandwich reuses k; upper-index metric derivatives lowered"},
    {"r2.8", "r2", 8, "index-placement,index-collision", false,
     "+1/2gi(j,l)G(a;j,l)[-gi(k,L)h(L,S)gi(S,r)(h(k,r){a}+h(a,r){k}-h(k,a){r})+gi(k,u)h(u,v)"
     "gi(v,w)h(w,z)gi(z,r)(g(k,r){a}+g(a,r){k}-g(k,a){r})]",
     "ḡ_{jl} read as ḡ^{jl}; the bracket is Γ^k_{kα}, not Γ^k_{kl}; upper-index metric derivatives lowered"},
    {"r2.9", "r2", 9, "index-placement,index-collision", false,
     "+1/4gi(j,l)[gi(a,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(a,L)h(L,S)gi(S,r)(g(j,r){l}+g(l,r){j}-"
     "g(j,l){r})][gi(k,e)(h(k,e){a}+h(a,e){k}-h(k,a){e})-gi(k,u)h(u,v)gi(v,e)(g(k,e){a}+g(a,e){k}-"
     "g(k,a){e})]",
     "ḡ_{jl} read as ḡ^{jl}; the first bracket is Γ^k_{kα}; the two brackets get separate summation letters; upper-index metric derivatives lowered"},
    {"r2.10", "r2", 10, "index-placement,index-collision", false,
     "-1/2gi(j,L)h(L,S)gi(S,l)[gi(a,r)(h(j,r){l}+h(l,r){j}-h(j,l){r})-gi(a,u)h(u,v)gi(v,r)(g(j,r)"
     "{l}+g(l,r){j}-g(j,l){r})]G(k;k,a)",
     "ḡ_{jλ} read as ḡ^{jλ}; the outer Γ̄ is Γ̄^k_{kα}; upper-index metric derivatives lowered"},
    {"r2.11", "r2", 11, "index-placement,index-collision", false,
     "-1/2gi(j,L)h(L,S)gi(S,l)G(a;j,l)[gi(k,r)(h(k,r){a}+h(a,r){k}-h(k,a){r})-gi(k,u)h(u,v)gi(v,r)"
     "(g(k,r){a}+g(a,r){k}-g(k,a){r})]",
     "ḡ_{jλ} read as ḡ^{jλ}; the outer Γ̄ is Γ̄^α_{jl} and the bracket is Γ^k_{kα}; upper-index metric derivatives lowered"},
    {"r2.12", "r2", 12, "derivative-letter", false,
     "+1/2gi(j,l)d{j}(gi(k,L)h(L,S)gi(S,r))(h(k,r){l}+h(l,r){k}-h(k,l){r})",
     "∂_k reads ∂_j, as in the neighbouring ∂_j terms"},
    {"r2.14", "r2", 14, "derivative-letter,index-placement", false,
     "-1/2gi(j,l)d{j}(gi(k,L)h(L,S)gi(S,c)h(c,m)gi(m,r))(g(k,r){l}+g(l,r){k}-g(k,l){r})",
     "∂_k reads ∂_j; upper-index metric derivatives lowered"},
    {"r2.15", "r2", 15, "index-placement", false,
     "-1/2gi(j,l)gi(k,L)h(L,S)gi(S,c)h(c,m)gi(m,r)(g(k,r){j,l}+g(l,r){j,k}-g(k,l){j,r})",
     "upper-index metric derivatives lowered"},
    {"r2.17", "r2", 17, "index-placement", false,
     "+1/2gi(j,L)h(L,S)gi(S,l)[d{j}(gi(k,r))(h(k,r){l}+h(l,r){k}-h(k,l){r})+gi(k,r)(h(k,r){j,l}+"
     "h(l,r){j,k}-h(k,l){j,r})-d{j}(gi(k,u)h(u,v)gi(v,r))(g(k,r){l}+g(l,r){k}-g(k,l){r})-gi(k,u)"
     "h(u,v)gi(v,r)(g(k,r){j,l}+g(l,r){j,k}-g(k,l){j,r})]",
     "ḡ_{jλ} read as ḡ^{jλ}; the inner sandwich gets its own letters; upper-index metric derivatives lowered"},
    {"r2.18", "r2", 18, "index-collision", false,
     "-gi(j,L)h(L,S)gi(S,c)h(c,m)gi(m,l)G(a;k,l)G(k;j,a)",
     "the sandwich reuses α"},
    {"r2.19", "r2", 19, "index-placement,index-collision", false,
     "-1/2gi(j,l)G(a;k,l)[-gi(k,L)h(L,S)gi(S,r)(h(j,r){a}+h(a,r){j}-h(j,a){r})+gi(k,u)h(u,v)"
     "gi(v,w)h(w,z)gi(z,r)(g(j,r){a}+g(a,r){j}-g(j,a){r})]",
     "ḡ_{jl} read as ḡ^{jl}; the bracket is Γ^k_{jα}; upper-index metric derivatives lowered"},
    {"r2.20", "r2", 20, "index-placement,index-collision", false,
     "-1/2gi(j,l)[-gi(a,L)h(L,S)gi(S,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})+gi(a,u)h(u,v)gi(v,w)h(w,z)"
     "gi(z,r)(g(k,r){l}+g(l,r){k}-g(k,l){r})]G(k;j,a)",
     "ḡ_{jl} read as ḡ^{jl}; the outer Γ̄ is Γ̄^k_{jα}; upper-index metric derivatives lowered"},
    {"r2.21", "r2", 21, "index-placement,index-collision,sign", true,
     "-1/4gi(j,l)[gi(a,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(a,L)h(L,S)gi(S,r)(g(k,r){l}+g(l,r){k}-"
     "g(k,l){r})][gi(k,e)(h(j,e){a}+h(a,e){j}-h(j,a){e})-gi(k,u)h(u,v)gi(v,e)(g(j,e){a}+g(a,e){j}-"
     "g(j,a){e})]",
     "ḡ_{jl} read as ḡ^{jl}; the brackets are Γ^α_{kl} and Γ^k_{jα} with separate summation letters; the product enters with a minus sign"},
    {"r2.22", "r2", 22, "index-placement,index-collision", false,
     "+1/2gi(j,L)h(L,S)gi(S,l)G(a;k,l)[gi(k,r)(h(j,r){a}+h(a,r){j}-h(j,a){r})-gi(k,u)h(u,v)gi(v,r)"
     "(g(j,r){a}+g(a,r){j}-g(j,a){r})]",
     "ḡ_{jλ} read as ḡ^{jλ}; the bracket is Γ^k_{jα}; upper-index metric derivatives lowered"},
    {"r2.23", "r2", 23, "index-placement,index-collision", false,
     "+1/2gi(j,L)h(L,S)gi(S,l)[gi(a,r)(h(k,r){l}+h(l,r){k}-h(k,l){r})-gi(a,u)h(u,v)gi(v,r)(g(k,r)"
     "{l}+g(l,r){k}-g(k,l){r})]G(k;j,a)",
     "ḡ_{jλ} read as ḡ^{jλ}; the inner sandwich gets its own letters; upper-index metric derivatives lowered"},
    {"a1.3", "a1", 3, "index-placement,index-collision", false,
     "+1/2gi(a,b)[gi(k,m)(h(a,m){b}+h(b,m){a}-h(a,b){m})-gi(k,L)h(L,S)gi(S,m)(g(a,m){b}+g(b,m){a}-"
     "g(a,b){m})]d{k}(f1{j}f2{l}gi(j,l))",
     "the bracket reuses l from the probe product; upper-index metric derivatives lowered"},
    {"a2.1", "a2", 1, "index-collision,sign", true,
     "-gi(a,L)h(L,S)gi(S,c)h(c,m)gi(m,b)d{a,b}(f1{j}f2{l}gi(j,l))",
     "the sandwich reuses j and l; the ε² coefficient of g^{αβ} enters Δ with a minus sign"},
    {"a2.2", "a2", 2, "index-collision,sign", true,
     "-gi(a,b)d{a,b}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,c)h(c,m)gi(m,l))",
     "the sandwich reuses α and β; sign as for the first summand"},
    {"a2.3", "a2", 3, "index-collision,sign", true,
     "+gi(a,L)h(L,S)gi(S,c)h(c,m)gi(m,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,l))",
     "the sandwich reuses j and l; the Γ̄ part enters with a plus sign"},
    {"a2.4", "a2", 4, "index-collision,sign", true,
     "+gi(a,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,L)h(L,S)gi(S,c)h(c,m)gi(m,l))",
     "the sandwich reuses α and β; sign as for the third summand"},
    {"a2.5", "a2", 5, "index-placement,index-collision", false,
     "+1/2gi(a,b)[-gi(k,L)h(L,S)gi(S,r)(h(a,r){b}+h(b,r){a}-h(a,b){r})+gi(k,u)h(u,v)gi(v,w)h(w,z)"
     "gi(z,r)(g(a,r){b}+g(b,r){a}-g(a,b){r})]d{k}(f1{j}f2{l}gi(j,l))",
     "the bracket reuses i, j and l; upper-index metric derivatives lowered"},
    {"a2.6", "a2", 6, "index-collision", false,
     "-gi(a,L)h(L,S)gi(S,b)d{a,b}(f1{j}f2{l}gi(j,u)h(u,v)gi(v,l))",
     "the two sandwiches share λ and σ"},
    {"a2.7", "a2", 7, "index-collision,sign", true,
     "+gi(a,L)h(L,S)gi(S,b)G(k;a,b)d{k}(f1{j}f2{l}gi(j,u)h(u,v)gi(v,l))",
     "the two sandwiches share λ and σ; the product of two first-order factors enters with a plus sign"},
    {"a2.8", "a2", 8, "index-placement,index-collision,sign", true,
     "-1/2gi(a,L)h(L,S)gi(S,b)[gi(k,r)(h(a,r){b}+h(b,r){a}-h(a,b){r})-gi(k,u)h(u,v)gi(v,r)(g(a,r)"
     "{b}+g(b,r){a}-g(a,b){r})]d{k}(f1{j}f2{l}gi(j,l))",
     "the sandwiches share λ and σ and the bracket reuses l; upper-index metric derivatives lowered; sign of g[1]·Γ[1]"},
    {"a2.9", "a2", 9, "index-placement,index-collision,sign", true,
     "-1/2gi(a,b)[gi(k,r)(h(a,r){b}+h(b,r){a}-h(a,b){r})-gi(k,L)h(L,S)gi(S,r)(g(a,r){b}+g(b,r){a}-"
     "g(a,b){r})]d{k}(f1{j}f2{l}gi(j,u)h(u,v)gi(v,l))",
     "the probe sandwich reads ḡ^{αλ} for ḡ^{jλ} and the bracket reuses l; upper-index metric derivatives lowered; sign of Γ[1]·∂P[1]"},
    {"b1.5", "b1", 5, "index-placement,index-collision", false,
     "-1/2f1{l,b}f2{m}[gi(m,j)(h(p,j){q}+h(q,j){p}-h(p,q){j})-gi(m,L)h(L,S)gi(S,j)(g(p,j){q}+"
     "g(q,j){p}-g(p,q){j})]gi(b,p)gi(l,q)",
     "the bracket reuses l; upper-index metric derivatives lowered"},
    {"b1.6", "b1", 6, "index-placement", false,
     "-1/2f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(g(b,j){l}+g(l,j){b}-"
     "g(b,l){j})]f2{p,q}gi(b,p)gi(l,q)",
     "upper-index metric derivatives lowered"},
    {"b1.7", "b1", 7, "index-placement,index-collision", false,
     "+1/2f1{k}G(k;b,l)f2{m}[gi(m,j)(h(p,j){q}+h(q,j){p}-h(p,q){j})-gi(m,L)h(L,S)gi(S,j)(g(p,j)"
     "{q}+g(q,j){p}-g(p,q){j})]gi(b,p)gi(l,q)",
     "the bracket reuses l; upper-index metric derivatives lowered"},
    {"b1.8", "b1", 8, "index-placement,stray-factor", false,
     "+1/2f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(g(b,j){l}+g(l,j){b}-"
     "g(b,l){j})]f2{m}G(m;p,q)gi(b,p)gi(l,q)",
     "the extra ∂²f₂/∂x_p∂x_q factor is dropped; upper-index metric derivatives lowered"},
    {"b2.3", "b2", 3, "index-placement", false,
     "-1/2f1{k}[-gi(k,L)h(L,S)gi(S,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})+gi(k,u)h(u,v)gi(v,w)h(w,z)"
     "gi(z,j)(g(b,j){l}+g(l,j){b}-g(b,l){j})](f2{p,q}-f2{m}G(m;p,q))gi(b,p)gi(l,q)",
     "∂ḡ^{pj}/∂x_l reads ∂ḡ_{βj}/∂x_l; upper-index metric derivatives lowered"},
    {"b2.4", "b2", 4, "index-placement,index-collision", false,
     "-1/2(f1{l,b}-f1{k}G(k;b,l))f2{m}[-gi(m,L)h(L,S)gi(S,j)(h(p,j){q}+h(q,j){p}-h(p,q){j})+"
     "gi(m,u)h(u,v)gi(v,w)h(w,z)gi(z,j)(g(p,j){q}+g(q,j){p}-g(p,q){j})]gi(b,p)gi(l,q)",
     "the bracket reuses l; upper-index metric derivatives lowered"},
    {"b2.5", "b2", 5, "index-collision", false,
     "+(f1{l,b}-f1{k}G(k;b,l))(f2{p,q}-f2{m}G(m;p,q))gi(b,L)h(L,S)gi(S,p)gi(l,u)h(u,v)gi(v,q)",
     "the two sandwiches share λ and σ"},
    {"b2.6", "b2", 6, "index-placement,index-collision", false,
     "+1/2f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(g(b,j){l}+g(l,j){b}-"
     "g(b,l){j})](f2{p,q}-f2{m}G(m;p,q))(gi(b,u)h(u,v)gi(v,p)gi(l,q)+gi(b,p)gi(l,u)h(u,v)gi(v,q))",
     "the sandwiches share λ and σ; upper-index metric derivatives lowered"},
    {"b2.7", "b2", 7, "index-placement,index-collision", false,
     "+1/2(f1{l,b}-f1{k}G(k;b,l))f2{m}[gi(m,j)(h(p,j){q}+h(q,j){p}-h(p,q){j})-gi(m,L)h(L,S)gi(S,j)"
     "(g(p,j){q}+g(q,j){p}-g(p,q){j})](gi(b,u)h(u,v)gi(v,p)gi(l,q)+gi(b,p)gi(l,u)h(u,v)gi(v,q))",
     "the bracket reuses l and the sandwiches share λ and σ; upper-index metric derivatives lowered"},
    {"b2.8", "b2", 8, "index-placement,index-collision", false,
     "+1/4f1{k}[gi(k,j)(h(b,j){l}+h(l,j){b}-h(b,l){j})-gi(k,L)h(L,S)gi(S,j)(g(b,j){l}+g(l,j){b}-"
     "g(b,l){j})]f2{m}[gi(m,e)(h(p,e){q}+h(q,e){p}-h(p,q){e})-gi(m,u)h(u,v)gi(v,e)(g(p,e){q}+"
     "g(q,e){p}-g(p,q){e})]gi(b,p)gi(l,q)",
     "the two brackets share their summation letters; upper-index metric derivatives lowered"},
    {"d1.3", "d1", 3, "index-placement", false,
     "-1/2[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})]gi(p,q)[gi(r,k)(h(p,k){q}+h(q,k){p}-h(p,q){k})-gi(r,L)"
     "h(L,S)gi(S,k)(g(p,k){q}+g(q,k){p}-g(p,q){k})]f2{r}",
     "upper-index metric derivatives lowered"},
    {"d1.4", "d1", 4, "index-placement", false,
     "-1/2gi(a,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(g(a,k){b}+g(b,k){a}-"
     "g(a,b){k})]f1{l}[gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]",
     "the second group differentiates ḡ_{αk}, ḡ_{βk}, ḡ_{αβ}; upper-index metric derivatives lowered"},
    {"d2.3", "d2", 3, "index-placement,index-collision", false,
     "-1/2gi(a,b)[-gi(l,L)h(L,S)gi(S,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})+gi(l,u)h(u,v)gi(v,w)h(w,z)"
     "gi(z,k)(g(a,k){b}+g(b,k){a}-g(a,b){k})]f1{l}[gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]",
     "the sandwich ends in β instead of k; upper-index metric derivatives lowered"},
    {"d2.4", "d2", 4, "index-placement,index-collision", false,
     "-1/2[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})]gi(p,q)[-gi(r,L)h(L,S)gi(S,k)(h(p,k){q}+h(q,k){p}-h(p,q)"
     "{k})+gi(r,u)h(u,v)gi(v,w)h(w,z)gi(z,k)(g(p,k){q}+g(q,k){p}-g(p,q){k})]f2{r}",
     "the sandwich ends in q instead of k; upper-index metric derivatives lowered"},
    {"d2.5", "d2", 5, "index-placement,index-collision", false,
     "+1/2gi(a,L)h(L,S)gi(S,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,u)h(u,v)gi(v,k)(g(a,k)"
     "{b}+g(b,k){a}-g(a,b){k})]f1{l}[gi(p,q)(f2{p,q}-G(r;p,q)f2{r})]",
     "the sandwiches share λ and σ; the second group differentiates ḡ_{αk}, ḡ_{βk}, ḡ_{αβ}; upper-index metric derivatives lowered"},
    {"d2.6", "d2", 6, "index-placement,index-collision", false,
     "+1/2[gi(a,b)(f1{a,b}-G(l;a,b)f1{l})]gi(p,L)h(L,S)gi(S,q)[gi(r,k)(h(p,k){q}+h(q,k){p}-h(p,q)"
     "{k})-gi(r,u)h(u,v)gi(v,k)(g(p,k){q}+g(q,k){p}-g(p,q){k})]f2{r}",
     "the sandwiches share λ and σ; upper-index metric derivatives lowered"},
    {"d2.7", "d2", 7, "index-collision", false,
     "+[gi(a,L)h(L,S)gi(S,b)(f1{a,b}-G(l;a,b)f1{l})][gi(p,u)h(u,v)gi(v,q)(f2{p,q}-G(r;p,q)f2{r})]",
     "the two sandwiches share λ and σ"},
    {"d2.8", "d2", 8, "index-placement,index-collision", false,
     "+1/2gi(a,L)h(L,S)gi(S,b)(f1{a,b}-G(l;a,b)f1{l})gi(p,q)[gi(r,k)(h(p,k){q}+h(q,k){p}-h(p,q)"
     "{k})-gi(r,u)h(u,v)gi(v,k)(g(p,k){q}+g(q,k){p}-g(p,q){k})]f2{r}",
     "the sandwiches share λ and σ; upper-index metric derivatives lowered"},
    {"d2.9", "d2", 9, "index-placement,missing-factor", false,
     "+1/2gi(a,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(g(a,k){b}+g(b,k){a}-"
     "g(a,b){k})]f1{l}[gi(p,u)h(u,v)gi(v,q)(f2{p,q}-G(r;p,q)f2{r})]",
     "the ∂f₁/∂x_l factor is missing; the second group differentiates ḡ_{αk}, ḡ_{βk}, ḡ_{αβ}; upper-index metric derivatives lowered"},
    {"d2.10", "d2", 10, "index-placement,missing-factor", false,
     "+1/4gi(a,b)[gi(l,k)(h(a,k){b}+h(b,k){a}-h(a,b){k})-gi(l,L)h(L,S)gi(S,k)(g(a,k){b}+g(b,k){a}-"
     "g(a,b){k})]f1{l}gi(p,q)[gi(r,e)(h(p,e){q}+h(q,e){p}-h(p,q){e})-gi(r,u)h(u,v)gi(v,e)(g(p,e)"
     "{q}+g(q,e){p}-g(p,q){e})]f2{r}",
     "the ∂f₁/∂x_l factor is missing and the second bracket is the first-order Christoffel term; upper-index metric derivatives lowered"},
};

double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0.0 : std::abs(a - b) / s;
}

std::string summand_text(const AppendixForm& f, const FormSummand& t, const std::vector<std::string>& fixes) {
  for (const std::string& id : fixes) {
    const FormFix* fix = nullptr;
    for (const FormFix& x : kFixes)
      if (x.id == id) fix = &x;
    if (!fix) throw ConfigError("unknown appendix fix '" + id + "'");
    if (fix->form == f.name && fix->position == t.position) return fix->replacement;
  }
  return t.text;
}

double eval_form(const AppendixForm& f, const AppendixPoint& p, const std::vector<std::string>& fixes,
                 const std::map<char, int>& bound) {
  double sum = 0;
  for (const FormSummand& t : f.summands) sum += evaluate_text(summand_text(f, t, fixes), p, bound);
  return sum;
}

bool is_tensor_form(const std::string& name) { return name == "G1" || name == "G2"; }

}  // namespace

const std::vector<AppendixForm>& appendix_forms() { return kForms; }

const AppendixForm& appendix_form(const std::string& name) {
  for (const AppendixForm& f : kForms)
    if (f.name == name) return f;
  throw ConfigError("unknown appendix coefficient '" + name + "'");
}

const std::vector<FormFix>& appendix_fixes() { return kFixes; }

std::vector<std::string> fix_ids(const std::string& form) {
  appendix_form(form);
  std::vector<std::string> out;
  for (const FormFix& f : kFixes)
    if (f.form == form) out.push_back(f.id);
  return out;
}

IndexAudit audit_summand(const std::string& text, const std::string& free) {
  IndexAudit audit;
  for (const Monomial& m : expand(text)) {
    std::map<char, std::pair<int, int>> count;  // (up, down)
    for (const Atom& a : m.atoms) {
      for (std::size_t t = 0; t < a.idx.size(); ++t) {
        const bool up = a.kind == AtomKind::GInv || (a.kind == AtomKind::Gamma && t == 0);
        (up ? count[a.idx[t]].first : count[a.idx[t]].second)++;
      }
      for (char c : a.der) count[c].second++;
    }
    for (const auto& [c, ud] : count) {
      const std::size_t at = free.find(c);
      bool ok;
      if (at == std::string::npos) {
        ok = ud.first == 1 && ud.second == 1;
      } else {
        ok = at == 0 ? (ud.first == 1 && ud.second == 0) : (ud.first == 0 && ud.second == 1);
      }
      if (!ok) {
        audit.consistent = false;
        audit.offending.insert(c);
      }
    }
    for (char c : free)
      if (!count.count(c)) {
        audit.consistent = false;
        audit.offending.insert(c);
      }
  }
  return audit;
}

AppendixPoint appendix_point(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2) {
  if (s.dim != 4) throw ConfigError("appendix forms are written for dimension 4");
  AppendixPoint p;
  p.n = s.dim;
  const MetricPair mp = eval_metric_pair(s, x, 3);
  p.gbar = mp.gbar;
  p.gpert = mp.gpert;
  const PointGeometry base = point_geometry(s, x, 0, 3);
  p.gbar_inv = base.ginv[0];
  p.gamma = base.gamma[0];
  p.f1 = jet_eval(f1, x.data(), s.dim, 4);
  p.f2 = jet_eval(f2, x.data(), s.dim, 4);

  const PointGeometry geo = point_geometry(s, x, 2);
  p.r = scalar_curvature_series(geo);
  p.a4 = a4_density_series(geo, jet_eval(f1, x.data(), s.dim, kProbeDegree), jet_eval(f2, x.data(), s.dim, kProbeDegree));
  p.gamma_series = geo.gamma_v;
  return p;
}

double appendix_eval(const std::string& name, const AppendixPoint& p, const std::vector<std::string>& fixes) {
  const AppendixForm& f = appendix_form(name);
  if (is_tensor_form(name)) throw ConfigError("'" + name + "' is tensor valued; use appendix_eval_tensor");
  return eval_form(f, p, fixes, {});
}

double appendix_eval(const std::string& name, const MetricScene& s, const ChartPoint& x, const Expr& f1,
                     const Expr& f2, bool corrected) {
  const AppendixPoint p = appendix_point(s, x, f1, f2);
  return appendix_eval(name, p, corrected ? fix_ids(name) : std::vector<std::string>{});
}

Rank3 appendix_eval_tensor(const std::string& name, const AppendixPoint& p, const std::vector<std::string>& fixes) {
  const AppendixForm& f = appendix_form(name);
  if (!is_tensor_form(name)) throw ConfigError("'" + name + "' is scalar valued; use appendix_eval");
  Rank3 out(p.n, Eigen::MatrixXd::Zero(p.n, p.n));
  for (int k = 0; k < p.n; ++k)
    for (int i = 0; i < p.n; ++i)
      for (int j = 0; j < p.n; ++j)
        out[k](i, j) = eval_form(f, p, fixes, {{f.free[0], k}, {f.free[1], i}, {f.free[2], j}});
  return out;
}

double engine_value(const std::string& name, const AppendixPoint& p) {
  appendix_form(name);
  if (is_tensor_form(name)) throw ConfigError("'" + name + "' is tensor valued; use engine_tensor");
  const int k = name[1] - '0';
  switch (name[0]) {
    case 'r': return p.r[k];
    case 'a': return p.a4.a[k];
    case 'b': return p.a4.b[k];
    case 'd': return p.a4.d[k];
  }
  throw ConfigError("unknown appendix coefficient '" + name + "'");
}

Rank3 engine_tensor(const std::string& name, const AppendixPoint& p) {
  appendix_form(name);
  if (!is_tensor_form(name)) throw ConfigError("'" + name + "' is scalar valued; use engine_value");
  return p.gamma_series[name[1] - '0'];
}

std::vector<TranscriptionDiscrepancy> crosscheck_appendix(const std::vector<MetricScene>& scenes,
                                                          const std::vector<ChartPoint>& points,
                                                          CrosscheckOptions opt) {
  std::vector<TranscriptionDiscrepancy> out;
  for (const MetricScene& s : scenes)
    for (const ChartPoint& x : points) {
      AppendixPoint p;
      std::string error;
      try {
        p = appendix_point(s, x, s.probes.at("f1"), s.probes.at("f2"));
      } catch (const std::exception& e) {
        error = e.what();
      }
      for (const AppendixForm& f : kForms) {
        TranscriptionDiscrepancy d;
        d.coefficient = f.name;
        d.scene = s.name;
        d.point = x;
        if (!error.empty()) {
          d.error = error;
          out.push_back(d);
          continue;
        }
        const std::vector<std::string> fixes = fix_ids(f.name);
        if (is_tensor_form(f.name)) {
          const Rank3 e = engine_tensor(f.name, p), t = appendix_eval_tensor(f.name, p),
                      c = appendix_eval_tensor(f.name, p, fixes);
          // report the component with the largest verbatim gap
          double worst = -1;
          for (int k = 0; k < p.n; ++k)
            for (int i = 0; i < p.n; ++i)
              for (int j = 0; j < p.n; ++j) {
                const double g = std::abs(e[k](i, j) - t[k](i, j));
                if (g > worst) {
                  worst = g;
                  d.engine = e[k](i, j);
                  d.transcription = t[k](i, j);
                  d.corrected = c[k](i, j);
                }
              }
        } else {
          d.engine = engine_value(f.name, p);
          d.transcription = appendix_eval(f.name, p);
          d.corrected = appendix_eval(f.name, p, fixes);
        }
        d.abs_gap = std::abs(d.engine - d.transcription);
        d.rel_gap = rel_gap(d.engine, d.transcription);
        d.corrected_abs_gap = std::abs(d.engine - d.corrected);
        d.corrected_rel_gap = rel_gap(d.engine, d.corrected);
        d.suspected_typo = d.rel_gap > opt.close_tol && d.corrected_rel_gap <= opt.close_tol;
        out.push_back(d);
      }
    }
  return out;
}

std::map<std::string, GapSummary> summarize_gaps(const std::vector<TranscriptionDiscrepancy>& records) {
  std::map<std::string, GapSummary> out;
  for (const auto& d : records) {
    GapSummary& g = out[d.coefficient];
    ++g.records;
    if (!d.error.empty()) {
      ++g.failures;
      continue;
    }
    g.verbatim = std::max(g.verbatim, d.rel_gap);
    g.corrected = std::max(g.corrected, d.corrected_rel_gap);
  }
  return out;
}

}  // namespace bimetric
