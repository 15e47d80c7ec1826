#ifndef PWLBFGS_INVARIANTS_HPP
#define PWLBFGS_INVARIANTS_HPP

#include <string>
#include <vector>

#include "pwlbfgs/solver.hpp"

namespace pwlbfgs {

// One verified property over its prescribed index range. Ranges are derived
// from the termination index: with the failing iteration at K_term, steps
// were accepted exactly for k = 0 .. K_term-1, and each property quantifies
// over the range its derivation supports.
struct CheckItem {
  std::string name;
  std::string range;  // e.g. "k in [0, 6]"
  bool pass = true;
  bool vacuous = false;   // range was empty
  bool skipped = false;   // not applicable (degenerate parameters)
  int first_violation_k = -1;
  std::string detail;
};

struct InvariantReport {
  std::vector<CheckItem> items;
  bool all_pass = true;

  void add(CheckItem item);
  std::string to_text() const;
  std::string to_json_string() const;
};

// Lower bounds tied to non-termination: ez > 0 over accepted iterations,
// ez - ee/2 > 0 and alpha* > 0 one short of that, alpha > alpha* two short.
std::vector<CheckItem> check_lemma1(const RunRecord& record);

// Two-sided step-size bounds: gamma < alpha for every accepted step, and
// alpha < zx / (ez - ee/2) where the denominator's positivity is guaranteed.
// The upper side is skipped for degenerate parameters (it rests on c1 > 0).
std::vector<CheckItem> check_lemma2(const RunRecord& record);

// Sign/range conditions on delta, a, psi, gamma; the three recursion
// identities they satisfy; the squeeze max{1, delta*psi} < a < psi; and the
// monotone decrease of psi.
std::vector<CheckItem> check_lemma34(const RunRecord& record);

struct TerminationPrediction {
  CheckItem item;
  int first_psi_le_1 = -1;  // -1 = never
  int first_a_le_1 = -1;
  int predicted_bound = -1;  // K_term <= bound; -1 = no prediction applied
};

// First indices where psi or the normalized step drop to 1 or below predict
// termination within two further iterations.
TerminationPrediction predict_termination(const RunRecord& record);

// Everything above plus the trace-wide state checks (D > 0, zx > 0, strict
// descent, sign alternation, SPD preservation, analytic termination cause).
InvariantReport verify_record(const RunRecord& record);

}  // namespace pwlbfgs

#endif
