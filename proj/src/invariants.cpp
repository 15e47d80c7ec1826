#include "pwlbfgs/invariants.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace pwlbfgs {

namespace {

struct Checker {
  const RunRecord& rec;
  Real band;
  int k_alive;  // last iteration with an accepted step; -1 if none

  explicit Checker(const RunRecord& r)
      : rec(r),
        band(tolerance_band(PrecisionContext(r.config.precision_bits))),
        k_alive(r.termination_index - 1) {}

  static std::string range_str(int lo, int hi) {
    std::ostringstream os;
    if (hi < lo) {
      os << "empty";
    } else {
      os << "k in [" << lo << ", " << hi << "]";
    }
    return os.str();
  }

  // Walks k over [lo, hi]; `test` returns an empty string on pass, else a
  // violation description.
  template <typename F>
  CheckItem ranged(const std::string& name, int lo, int hi, F&& test) const {
    CheckItem item;
    item.name = name;
    item.range = range_str(lo, hi);
    if (hi < lo) {
      item.vacuous = true;
      return item;
    }
    for (int k = lo; k <= hi; ++k) {
      std::string why = test(k);
      if (!why.empty()) {
        item.pass = false;
        item.first_violation_k = k;
        item.detail = "k=" + std::to_string(k) + ": " + why;
        return item;
      }
    }
    return item;
  }

  static CheckItem skipped(const std::string& name, const std::string& why) {
    CheckItem item;
    item.name = name;
    item.range = "skipped";
    item.skipped = true;
    item.detail = why;
    return item;
  }

  bool strict(const Real& x, const Real& y) const {
    return strictly_greater(x, y, band);
  }

  const IterationRow& row(int k) const { return rec.rows[k]; }

  Real zero() const { return Real::from_long(0, rec.config.precision_bits); }
  Real one() const { return Real::from_long(1, rec.config.precision_bits); }
};

std::string need(const char* what) {
  return std::string(what) + " undefined where the range requires it";
}

}  // namespace

std::vector<CheckItem> check_lemma1(const RunRecord& rec) {
  Checker c(rec);
  std::vector<CheckItem> out;

  out.push_back(c.ranged("lemma1.ez_positive", 0, c.k_alive, [&](int k) {
    const ScalarState& s = c.row(k).direct;
    return c.strict(s.ez, c.zero()) ? "" : "ez = " + s.ez.to_decimal(12);
  }));

  out.push_back(c.ranged("lemma1.ez_minus_half_ee_positive", 0, c.k_alive - 1, [&](int k) {
    const ScalarState& s = c.row(k).direct;
    Real m = s.ez - s.ee / 2;
    return c.strict(m, c.zero()) ? "" : "ez - ee/2 = " + m.to_decimal(12);
  }));

  out.push_back(c.ranged("lemma1.alpha_star_positive", 0, c.k_alive - 1, [&](int k) {
    const auto& d = c.row(k).derived;
    if (!d.alpha_star) return need("alpha*");
    return c.strict(*d.alpha_star, c.zero()) ? ""
                                             : "alpha* = " + d.alpha_star->to_decimal(12);
  }));

  out.push_back(c.ranged("lemma1.alpha_above_threshold", 0, c.k_alive - 2, [&](int k) {
    const auto& r = c.row(k);
    if (!r.alpha || !r.derived.alpha_star) return need("alpha or alpha*");
    return c.strict(*r.alpha, *r.derived.alpha_star)
               ? ""
               : "alpha = " + r.alpha->to_decimal(12) +
                     " vs alpha* = " + r.derived.alpha_star->to_decimal(12);
  }));

  return out;
}

std::vector<CheckItem> check_lemma2(const RunRecord& rec) {
  Checker c(rec);
  std::vector<CheckItem> out;

  out.push_back(c.ranged("lemma2.alpha_above_gamma", 0, c.k_alive, [&](int k) {
    const auto& r = c.row(k);
    if (!r.alpha || !r.derived.gamma) return need("alpha or gamma");
    return c.strict(*r.alpha, *r.derived.gamma)
               ? ""
               : "alpha = " + r.alpha->to_decimal(12) +
                     " vs gamma = " + r.derived.gamma->to_decimal(12);
  }));

  if (rec.config.degenerate) {
    out.push_back(Checker::skipped("lemma2.alpha_below_armijo_bound",
                                   "upper bound rests on c1 > 0"));
  } else {
    out.push_back(c.ranged("lemma2.alpha_below_armijo_bound", 0, c.k_alive - 1, [&](int k) {
      const auto& r = c.row(k);
      const ScalarState& s = r.direct;
      Real denom = s.ez - s.ee / 2;
      if (!c.strict(denom, c.zero())) return std::string("denominator not positive");
      if (!r.alpha) return need("alpha");
      Real bound = s.zx / denom;
      return c.strict(bound, *r.alpha) ? ""
                                       : "alpha = " + r.alpha->to_decimal(12) +
                                             " vs bound = " + bound.to_decimal(12);
    }));
  }

  return out;
}

std::vector<CheckItem> check_lemma34(const RunRecord& rec) {
  Checker c(rec);
  std::vector<CheckItem> out;
  const int hi = c.k_alive - 2;

  out.push_back(c.ranged("lemma3.delta_in_01", 0, hi, [&](int k) {
    const auto& d = c.row(k).derived;
    if (!d.delta) return need("delta");
    bool ok = c.strict(*d.delta, c.zero()) && c.strict(c.one(), *d.delta);
    return ok ? "" : "delta = " + d.delta->to_decimal(12);
  }));

  auto positive = [&](const char* name, auto getter) {
    return c.ranged(name, 0, hi, [&, getter](int k) -> std::string {
      const auto& opt = getter(c.row(k).derived);
      if (!opt) return need(name);
      return c.strict(*opt, c.zero()) ? "" : std::string("value = ") + opt->to_decimal(12);
    });
  };
  out.push_back(positive("lemma3.a_positive",
                         [](const DerivedQuantities& d) -> const std::optional<Real>& { return d.a; }));
  out.push_back(positive("lemma3.psi_positive",
                         [](const DerivedQuantities& d) -> const std::optional<Real>& { return d.psi; }));
  out.push_back(positive("lemma3.gamma_positive",
                         [](const DerivedQuantities& d) -> const std::optional<Real>& { return d.gamma; }));

  // Recursion identities between consecutive rows.
  out.push_back(c.ranged("lemma4.psi_recursion", 0, hi, [&](int k) {
    const auto& d = c.row(k).derived;
    const auto& dn = c.row(k + 1).derived;
    if (!d.psi || !d.a || !d.delta || !dn.psi) return need("psi/a/delta");
    Real expect = *d.psi - (*d.psi - *d.a) / (c.one() - *d.delta);
    return within_band(*dn.psi, expect, c.band)
               ? ""
               : "psi' = " + dn.psi->to_decimal(25) + " vs " + expect.to_decimal(25);
  }));

  out.push_back(c.ranged("lemma4.gamma_recursion", 0, hi, [&](int k) {
    const auto& d = c.row(k).derived;
    const auto& dn = c.row(k + 1).derived;
    if (!d.psi || !d.a || !d.delta || !dn.gamma) return need("psi/a/delta/gamma");
    Real expect = c.one() / *d.delta - *d.psi / *d.a;
    return within_band(*dn.gamma, expect, c.band)
               ? ""
               : "gamma' = " + dn.gamma->to_decimal(25) + " vs " + expect.to_decimal(25);
  }));

  out.push_back(c.ranged("lemma4.delta_recursion", 0, hi, [&](int k) {
    const auto& d = c.row(k).derived;
    const auto& dn = c.row(k + 1).derived;
    if (!d.a || !d.delta || !dn.delta) return need("a/delta");
    Real expect = (c.one() - c.one() / *d.a) * (c.one() - *d.delta);
    return within_band(*dn.delta, expect, c.band)
               ? ""
               : "delta' = " + dn.delta->to_decimal(25) + " vs " + expect.to_decimal(25);
  }));

  out.push_back(c.ranged("lemma4.a_above_one", 0, hi, [&](int k) {
    const auto& d = c.row(k).derived;
    if (!d.a) return need("a");
    return c.strict(*d.a, c.one()) ? "" : "a = " + d.a->to_decimal(12);
  }));

  out.push_back(c.ranged("lemma4.squeeze_lower", 0, hi, [&](int k) {
    const auto& d = c.row(k).derived;
    if (!d.a || !d.delta || !d.psi) return need("a/delta/psi");
    Real dp = *d.delta * *d.psi;
    return c.strict(*d.a, dp) ? ""
                              : "delta*psi = " + dp.to_decimal(12) +
                                    " vs a = " + d.a->to_decimal(12);
  }));

  if (rec.config.degenerate) {
    out.push_back(Checker::skipped("lemma4.squeeze_upper", "upper side rests on c1 > 0"));
    out.push_back(Checker::skipped("lemma4.psi_monotone",
                                   "monotonicity rests on the squeeze upper side"));
  } else {
    out.push_back(c.ranged("lemma4.squeeze_upper", 0, hi, [&](int k) {
      const auto& d = c.row(k).derived;
      if (!d.a || !d.psi) return need("a/psi");
      return c.strict(*d.psi, *d.a) ? ""
                                    : "a = " + d.a->to_decimal(12) +
                                          " vs psi = " + d.psi->to_decimal(12);
    }));
    out.push_back(c.ranged("lemma4.psi_monotone", 0, hi, [&](int k) {
      const auto& d = c.row(k).derived;
      const auto& dn = c.row(k + 1).derived;
      if (!d.psi || !dn.psi) return need("psi");
      return c.strict(*d.psi, *dn.psi) ? ""
                                       : "psi = " + d.psi->to_decimal(12) +
                                             " then " + dn.psi->to_decimal(12);
    }));
  }

  return out;
}

TerminationPrediction predict_termination(const RunRecord& rec) {
  TerminationPrediction pred;
  const int K = rec.termination_index;
  PrecisionContext ctx(rec.config.precision_bits);
  const Real one = ctx.one();
  for (const IterationRow& r : rec.rows) {
    if (pred.first_psi_le_1 < 0 && r.derived.psi && *r.derived.psi <= one) {
      pred.first_psi_le_1 = r.k;
    }
    if (pred.first_a_le_1 < 0 && r.derived.a && *r.derived.a <= one) {
      pred.first_a_le_1 = r.k;
    }
  }
  int trigger = -1;
  if (pred.first_psi_le_1 >= 0) trigger = pred.first_psi_le_1;
  if (pred.first_a_le_1 >= 0 && (trigger < 0 || pred.first_a_le_1 < trigger)) {
    trigger = pred.first_a_le_1;
  }
  pred.item.name = "predict.termination";
  if (trigger < 0) {
    pred.item.range = "no trigger";
    pred.item.vacuous = true;
    return pred;
  }
  pred.predicted_bound = trigger + 2;
  pred.item.range = "trigger at k=" + std::to_string(trigger);
  pred.item.pass = K <= pred.predicted_bound;
  if (!pred.item.pass) {
    pred.item.first_violation_k = trigger;
    pred.item.detail = "terminated at " + std::to_string(K) + " > bound " +
                       std::to_string(pred.predicted_bound);
  } else {
    pred.item.detail = "terminated at " + std::to_string(K) + " <= bound " +
                       std::to_string(pred.predicted_bound);
  }
  return pred;
}

void InvariantReport::add(CheckItem item) {
  if (!item.pass) all_pass = false;
  items.push_back(std::move(item));
}

InvariantReport verify_record(const RunRecord& rec) {
  InvariantReport report;
  for (auto& item : check_lemma1(rec)) report.add(std::move(item));
  for (auto& item : check_lemma2(rec)) report.add(std::move(item));
  for (auto& item : check_lemma34(rec)) report.add(std::move(item));

  Checker c(rec);
  const int K = rec.termination_index;
  const bool two_piece_pair = rec.config.objective != ObjectiveKind::beta;

  if (two_piece_pair) {
    report.add(c.ranged("state.D_positive", 0, K, [&](int k) {
      const Real& D = c.row(k).direct.D;
      return c.strict(D, c.zero()) ? "" : "D = " + D.to_decimal(12);
    }));
  }
  report.add(c.ranged("state.zx_positive", 0, K, [&](int k) {
    const Real& zx = c.row(k).direct.zx;
    return c.strict(zx, c.zero()) ? "" : "zx = " + zx.to_decimal(12);
  }));

  if (rec.config.degenerate) {
    report.add(c.ranged("descent.monotone_weak", 0, c.k_alive, [&](int k) {
      return c.row(k + 1).f <= c.row(k).f ? "" : "f increased";
    }));
  } else {
    report.add(c.ranged("descent.monotone", 0, c.k_alive, [&](int k) {
      return c.strict(c.row(k).f, c.row(k + 1).f)
                 ? ""
                 : "f: " + c.row(k).f.to_decimal(20) + " then " +
                       c.row(k + 1).f.to_decimal(20);
    }));
  }

  report.add(c.ranged("sign.alternation", 0, c.k_alive, [&](int k) {
    int s0 = c.row(k).x1.sign();
    int s1 = c.row(k + 1).x1.sign();
    return s1 == -s0 ? "" : "sign did not flip";
  }));

  {
    CheckItem spd;
    spd.name = "spd.preserved";
    spd.range = "every update";
    spd.pass = rec.spd_verified;
    if (!rec.spd_verified) spd.detail = "pivot test not run or failed";
    report.add(std::move(spd));
  }

  if (rec.config.mode == LsMode::analytic && two_piece_pair) {
    CheckItem cause;
    cause.name = "termination.cause";
    cause.range = "final iteration";
    cause.pass = rec.cause == TerminationCause::unbounded_direction;
    cause.detail = to_string(rec.cause);
    report.add(std::move(cause));
  }

  report.add(predict_termination(rec).item);
  return report;
}

std::string InvariantReport::to_text() const {
  std::ostringstream os;
  for (const CheckItem& item : items) {
    os << (item.skipped ? "SKIP" : item.vacuous ? "PASS (vacuous)" : item.pass ? "PASS" : "FAIL")
       << "  " << item.name << "  [" << item.range << "]";
    if (!item.detail.empty()) os << "  " << item.detail;
    os << "\n";
  }
  os << (all_pass ? "all checks passed" : "VIOLATIONS PRESENT") << "\n";
  return os.str();
}

std::string InvariantReport::to_json_string() const {
  nlohmann::ordered_json j;
  j["all_pass"] = all_pass;
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckItem& item : items) {
    nlohmann::ordered_json c;
    c["name"] = item.name;
    c["range"] = item.range;
    c["pass"] = item.pass;
    c["vacuous"] = item.vacuous;
    c["skipped"] = item.skipped;
    if (item.first_violation_k >= 0) c["first_violation_k"] = item.first_violation_k;
    if (!item.detail.empty()) c["detail"] = item.detail;
    j["checks"].push_back(std::move(c));
  }
  return j.dump(2);
}

}  // namespace pwlbfgs
