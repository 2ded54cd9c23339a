#pragma once

// Literal transcriptions of the closed-form ε-coefficients (r, the a/b/d
// parts of A₄, and the first two Christoffel corrections) in a small index
// notation, evaluated by dense contraction and compared with the engine.
//
// Notation, one summand per string:
//   gi(a,b) ḡ^{ab}    g(a,b) ḡ_{ab}    h(a,b) g̿_{ab}    G(k;i,j) Γ̄^k_{ij}
//   f1, f2 probes;  X{k,l} is ∂_k∂_l X;  d{k}(...) applies ∂_k by Leibniz
//   numbers such as 1/2, signs, () and [] grouping, juxtaposition multiplies.
// Index letters are single characters (Greek written as a b c L S). Every
// distinct letter of an expanded monomial is summed once over 0..n−1, which
// is the literal reading of the printed summation; letters declared free are
// fixed instead.

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bimetric/connes.hpp"
#include "bimetric/oracle.hpp"

namespace bimetric {

struct FormSummand {
  int row = 0;       // display row inside the coefficient, from 1
  int position = 0;  // summand position inside the coefficient, from 1
  std::string text;
};

struct AppendixForm {
  std::string name;  // r0 r1 r2 a0 a1 a2 b0 b1 b2 d0 d1 d2 G1 G2
  std::string free;  // free letters in k,i,j order for the Christoffel forms
  std::vector<FormSummand> summands;
};

// A replacement of one index-inconsistent printed summand.
struct FormFix {
  std::string id;  // "<form>.<position>"
  std::string form;
  int position = 0;
  std::string kinds;  // comma list: index-placement, index-collision, derivative-letter,
                      // second-derivative, stray-factor, missing-factor, sign
  bool changes_sign = false;
  std::string replacement;
  std::string reason;
};

const std::vector<AppendixForm>& appendix_forms();
const AppendixForm& appendix_form(const std::string& name);  // ConfigError on unknown ids
const std::vector<FormFix>& appendix_fixes();
std::vector<std::string> fix_ids(const std::string& form);

// Index bookkeeping of one summand after expansion: letters that occur more
// than twice or twice in the same position in some monomial.
struct IndexAudit {
  bool consistent = true;
  std::set<char> offending;
};
IndexAudit audit_summand(const std::string& text, const std::string& free = "");

// Jets and engine values at one point, shared by all forms.
struct AppendixPoint {
  int n = 4;
  JetMatrix gbar, gbar_inv, gpert;
  JetRank3 gamma;  // Γ̄ of the base metric
  Jet f1, f2;
  // engine values
  EpsSeries<double> r;
  A4Series a4;
  std::vector<Rank3> gamma_series;  // orders 0..2
};
AppendixPoint appendix_point(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2);

// Value of a scalar form with the given fixes applied (empty = verbatim).
double appendix_eval(const std::string& name, const AppendixPoint& p, const std::vector<std::string>& fixes = {});
double appendix_eval(const std::string& name, const MetricScene& s, const ChartPoint& x, const Expr& f1,
                     const Expr& f2, bool corrected);
// Components [k][i](j) of a Christoffel form.
Rank3 appendix_eval_tensor(const std::string& name, const AppendixPoint& p, const std::vector<std::string>& fixes = {});

// Engine value of a scalar form; for G1/G2 use `engine_tensor`.
double engine_value(const std::string& name, const AppendixPoint& p);
Rank3 engine_tensor(const std::string& name, const AppendixPoint& p);

struct TranscriptionDiscrepancy {
  std::string coefficient;
  std::string scene;
  ChartPoint point;
  double engine = 0;
  double transcription = 0;  // verbatim
  double abs_gap = 0;
  double rel_gap = 0;  // abs_gap / max(|engine|, |transcription|), 0 when both vanish
  double corrected = 0;
  double corrected_abs_gap = 0;
  double corrected_rel_gap = 0;
  bool suspected_typo = false;  // the corrected variant closes a gap the verbatim one leaves
  std::string error;            // set when the point could not be evaluated
};

struct CrosscheckOptions {
  double close_tol = 1e-8;  // relative gap treated as agreement
};

// One record per (coefficient, scene, point); for the tensor forms the
// component with the largest verbatim gap is reported.
std::vector<TranscriptionDiscrepancy> crosscheck_appendix(const std::vector<MetricScene>& scenes,
                                                          const std::vector<ChartPoint>& points,
                                                          CrosscheckOptions opt = {});

// Per coefficient, the largest verbatim and corrected relative gaps.
struct GapSummary {
  double verbatim = 0, corrected = 0;
  int records = 0, failures = 0;
};
std::map<std::string, GapSummary> summarize_gaps(const std::vector<TranscriptionDiscrepancy>& records);

}  // namespace bimetric
