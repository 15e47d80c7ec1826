#include "pwlbfgs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace pwlbfgs {

using nlohmann::ordered_json;

SeededInit make_seeded_init(int n, std::uint64_t seed, const PrecisionContext& ctx) {
  Rng rng(seed);
  SymMatrix H0 = gaussian_matrix(n, rng, ctx);
  Vector x0 = gaussian_vector(n, rng, ctx);
  while (x0[0].is_zero()) x0[0] = ctx.real(rng.normal());
  return SeededInit{std::move(x0), std::move(H0)};
}

namespace {

LineSearchParams params_from(const PrecisionContext& ctx, const std::string& c1,
                             const std::string& c2, bool allow_degenerate,
                             int max_trials) {
  LineSearchParams p = LineSearchParams::custom(ctx, c1, c2, allow_degenerate);
  p.max_trials = max_trials;
  return p;
}

struct RunOutcome {
  int iterations = 0;
  int termination_index = 0;
  TerminationCause cause = TerminationCause::unbounded_direction;
  std::uint64_t seed = 0;
  bool violation = false;
  std::string note;
};

int resolve_jobs(int requested, int work_items) {
  int jobs = requested > 0
                 ? requested
                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(jobs, work_items));
}

// Runs `body(i)` for i in [0, count) on a small fixed pool. Each index owns
// its output slot, so results do not depend on the schedule.
template <typename F>
void parallel_for(int count, int jobs, F&& body) {
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& config) {
  PrecisionContext ctx(config.precision_bits);
  LineSearchParams params = params_from(ctx, config.c1, config.c2,
                                        config.allow_degenerate, config.max_ls_trials);

  std::vector<RunOutcome> results(config.runs);
  parallel_for(config.runs, resolve_jobs(config.jobs, config.runs), [&](int i) {
    RunOutcome& out = results[i];
    out.seed = stream_seed(config.seed, static_cast<std::uint64_t>(i));
    SeededInit init = make_seeded_init(config.n, out.seed, ctx);
    PwlObjective obj = PwlObjective::canonical(config.n, ctx);
    RunOptions opts;
    opts.mode = config.mode;
    opts.check_spd = config.verify;
    opts.record.keep_vectors = false;
    RunRecord rec = run(obj, init.x0, init.H0, params, ctx, opts);
    out.iterations = rec.iterations();
    out.termination_index = rec.termination_index;
    out.cause = rec.cause;
    if (config.verify) {
      InvariantReport report = verify_record(rec);
      out.violation = !report.all_pass;
      if (out.violation) {
        for (const CheckItem& item : report.items) {
          if (!item.pass) {
            out.note = item.name + " " + item.detail;
            break;
          }
        }
      }
    }
  });

  EnsembleStats stats;
  stats.config = config;
  stats.min_iterations = results.empty() ? 0 : results[0].iterations;
  for (const RunOutcome& r : results) {
    stats.sum_iterations += r.iterations;
    stats.min_iterations = std::min(stats.min_iterations, r.iterations);
    stats.max_iterations = std::max(stats.max_iterations, r.iterations);
    stats.histogram[r.iterations]++;
    if (r.cause == TerminationCause::unbounded_direction) {
      stats.count_unbounded++;
    } else {
      stats.count_trial_cap++;
    }
    if (config.verify) {
      stats.verified_runs++;
      if (r.violation) stats.violations++;
    }
  }
  stats.mean_iterations =
      static_cast<double>(stats.sum_iterations) / static_cast<double>(config.runs);

  // Median over the exact integer counts.
  const int runs = config.runs;
  auto nth_value = [&](int idx) {
    int seen = 0;
    for (const auto& [count, freq] : stats.histogram) {
      seen += freq;
      if (seen > idx) return count;
    }
    return 0;
  };
  if (runs % 2 == 1) {
    stats.median_iterations = nth_value(runs / 2);
  } else {
    stats.median_iterations =
        (static_cast<double>(nth_value(runs / 2 - 1)) + nth_value(runs / 2)) / 2.0;
  }

  std::ostringstream os;
  os << "run,seed,termination_index,iterations,cause\n";
  for (int i = 0; i < runs; ++i) {
    os << i << ',' << results[i].seed << ',' << results[i].termination_index << ','
       << results[i].iterations << ',' << to_string(results[i].cause) << '\n';
  }
  stats.per_run_csv = os.str();
  return stats;
}

std::string EnsembleStats::to_json_string() const {
  ordered_json j;
  j["n"] = config.n;
  j["runs"] = config.runs;
  j["seed"] = config.seed;
  j["c1"] = config.c1;
  j["c2"] = config.c2;
  j["precision_bits"] = config.precision_bits;
  j["ls_mode"] = config.mode == LsMode::analytic ? "analytic" : "emulate-paper";
  j["iterations"]["min"] = min_iterations;
  j["iterations"]["max"] = max_iterations;
  j["iterations"]["mean"] = mean_iterations;
  j["iterations"]["median"] = median_iterations;
  j["iterations"]["sum"] = sum_iterations;
  ordered_json hist = ordered_json::object();
  for (const auto& [count, freq] : histogram) hist[std::to_string(count)] = freq;
  j["iterations"]["histogram"] = std::move(hist);
  j["causes"]["unbounded_direction"] = count_unbounded;
  j["causes"]["trial_cap_exceeded"] = count_trial_cap;
  j["verified_runs"] = verified_runs;
  j["violations"] = violations;
  return j.dump(2);
}

namespace {

std::string cell(const std::optional<Real>& v, int digits) {
  return v ? v->to_decimal(digits) : std::string();
}

std::string log_cell(const std::optional<Real>& v, int digits) {
  if (!v || !(v->sign() > 0)) return std::string();
  return log(*v).to_decimal(digits);
}

}  // namespace

std::string trace_csv(const RunRecord& record, const TraceFormat& format) {
  const int d = format.digits;
  std::ostringstream os;
  os << "k,alpha,f,x1,ee,ez,zz,D_recursion,D_direct,zx,delta,alpha_star,a,psi,gamma,"
        "log_delta_psi,log_a,log_psi,ls_trials";
  if (format.hex) os << ",alpha_hex,f_hex,x1_hex,ee_hex,ez_hex,zz_hex,D_hex,zx_hex";
  os << "\n";
  for (const IterationRow& r : record.rows) {
    std::optional<Real> delta_psi;
    if (r.derived.delta && r.derived.psi) delta_psi = *r.derived.delta * *r.derived.psi;
    os << r.k << ',' << cell(r.alpha, d) << ',' << r.f.to_decimal(d) << ','
       << r.x1.to_decimal(d) << ',' << r.direct.ee.to_decimal(d) << ','
       << r.direct.ez.to_decimal(d) << ',' << r.direct.zz.to_decimal(d) << ','
       << r.shadow.D.to_decimal(d) << ',' << r.direct.D.to_decimal(d) << ','
       << r.direct.zx.to_decimal(d) << ',' << cell(r.derived.delta, d) << ','
       << cell(r.derived.alpha_star, d) << ',' << cell(r.derived.a, d) << ','
       << cell(r.derived.psi, d) << ',' << cell(r.derived.gamma, d) << ','
       << log_cell(delta_psi, d) << ',' << log_cell(r.derived.a, d) << ','
       << log_cell(r.derived.psi, d) << ',' << r.trials;
    if (format.hex) {
      os << ',' << (r.alpha ? r.alpha->to_hex() : std::string()) << ','
         << r.f.to_hex() << ',' << r.x1.to_hex() << ',' << r.direct.ee.to_hex() << ','
         << r.direct.ez.to_hex() << ',' << r.direct.zz.to_hex() << ','
         << r.direct.D.to_hex() << ',' << r.direct.zx.to_hex();
    }
    os << '\n';
  }
  return os.str();
}

std::string summary_json(const RunRecord& record, const InvariantReport& report,
                         const SeededInit* init_echo) {
  ordered_json j;
  const RunConfig& c = record.config;
  j["config"]["objective"] = c.objective == ObjectiveKind::canonical ? "canonical"
                             : c.objective == ObjectiveKind::general ? "general"
                                                                     : "beta";
  j["config"]["n"] = c.n;
  if (c.seed) {
    j["config"]["seed"] = *c.seed;
  } else {
    j["config"]["seed"] = nullptr;
  }
  j["config"]["c1"] = c.c1.to_decimal(25);
  j["config"]["c2"] = c.c2.to_decimal(25);
  j["config"]["precision_bits"] = c.precision_bits;
  j["config"]["ls_mode"] = c.mode == LsMode::analytic ? "analytic" : "emulate-paper";
  j["config"]["max_ls_trials"] = c.max_ls_trials;
  j["config"]["degenerate_params"] = c.degenerate;
  j["termination"]["cause"] = to_string(record.cause);
  j["termination"]["index"] = record.termination_index;
  j["termination"]["iterations"] = record.iterations();
  j["f_initial"] = record.rows.front().f.to_decimal(30);
  j["f_final"] = record.rows.back().f.to_decimal(30);
  j["max_shadow_deviation"] = record.max_shadow_dev.to_decimal(8);
  j["invariants_all_pass"] = report.all_pass;
  if (init_echo) {
    ordered_json x0 = ordered_json::array();
    for (int i = 0; i < init_echo->x0.size(); ++i) {
      x0.push_back(init_echo->x0[i].to_decimal_full());
    }
    ordered_json H0 = ordered_json::array();
    for (int i = 0; i < init_echo->H0.size(); ++i) {
      ordered_json row = ordered_json::array();
      for (int jj = 0; jj < init_echo->H0.size(); ++jj) {
        row.push_back(init_echo->H0.at(i, jj).to_decimal_full());
      }
      H0.push_back(std::move(row));
    }
    j["init_echo"]["x0"] = std::move(x0);
    j["init_echo"]["H0"] = std::move(H0);
  }
  return j.dump(2);
}

namespace {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<int, double>> points;
};

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string figure_svg(const RunRecord& record) {
  std::vector<Series> series{{"log(delta*psi)", "#1f77b4", {}},
                             {"log(a)", "#d62728", {}},
                             {"log(psi)", "#2ca02c", {}}};
  int kmax = 0;
  for (const IterationRow& r : record.rows) {
    auto push = [&](int idx, const std::optional<Real>& v) {
      if (v && v->sign() > 0) {
        series[idx].points.emplace_back(r.k, log(*v).to_double());
        kmax = std::max(kmax, r.k);
      }
    };
    std::optional<Real> delta_psi;
    if (r.derived.delta && r.derived.psi) delta_psi = *r.derived.delta * *r.derived.psi;
    push(0, delta_psi);
    push(1, r.derived.a);
    push(2, r.derived.psi);
  }

  double ymin = 0, ymax = 1;
  bool any = false;
  for (const Series& s : series) {
    for (auto& [k, v] : s.points) {
      if (!any) {
        ymin = ymax = v;
        any = true;
      }
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!any) kmax = 1;
  if (ymax - ymin < 1e-9) ymax = ymin + 1;

  const double W = 800, H = 500, ml = 70, mr = 160, mt = 30, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto X = [&](double k) { return ml + (kmax > 0 ? k / kmax : 0.5) * pw; };
  auto Y = [&](double v) { return mt + (1.0 - (v - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
     << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << mt + ph << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= kmax; ++k) {
    os << "<line x1=\"" << fmt2(X(k)) << "\" y1=\"" << mt + ph << "\" x2=\""
       << fmt2(X(k)) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << fmt2(X(k)) << "\" y=\"" << mt + ph + 20
       << "\" font-size=\"12\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  for (int t = 0; t <= 5; ++t) {
    double v = ymin + (ymax - ymin) * t / 5.0;
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt2(Y(v)) << "\" x2=\"" << ml
       << "\" y2=\"" << fmt2(Y(v)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << ml - 10 << "\" y=\"" << fmt2(Y(v) + 4)
       << "\" font-size=\"12\" text-anchor=\"end\">" << fmt2(v) << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10
     << "\" font-size=\"13\" text-anchor=\"middle\">iteration k</text>\n";

  int li = 0;
  for (const Series& s : series) {
    if (!s.points.empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (auto& [k, v] : s.points) os << fmt2(X(k)) << ',' << fmt2(Y(v)) << ' ';
      os << "\"/>\n";
      for (auto& [k, v] : s.points) {
        os << "<circle cx=\"" << fmt2(X(k)) << "\" cy=\"" << fmt2(Y(v))
           << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    }
    os << "<rect x=\"" << ml + pw + 14 << "\" y=\"" << mt + 18 * li << "\" width=\"12\" height=\"12\" fill=\""
       << s.color << "\"/>\n"
       << "<text x=\"" << ml + pw + 30 << "\" y=\"" << mt + 18 * li + 10
       << "\" font-size=\"12\">" << s.label << "</text>\n";
    ++li;
  }
  os << "</svg>\n";
  return os.str();
}

std::string init_file_json(const SeededInit& init) {
  ordered_json j;
  ordered_json x0 = ordered_json::array();
  for (int i = 0; i < init.x0.size(); ++i) x0.push_back(init.x0[i].to_decimal_full());
  ordered_json H0 = ordered_json::array();
  for (int i = 0; i < init.H0.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (int jj = 0; jj < init.H0.size(); ++jj) {
      row.push_back(init.H0.at(i, jj).to_decimal_full());
    }
    H0.push_back(std::move(row));
  }
  j["x0"] = std::move(x0);
  j["H0"] = std::move(H0);
  return j.dump(2);
}

namespace {

Real json_number(const nlohmann::json& v, const PrecisionContext& ctx) {
  if (v.is_string()) return ctx.real(v.get<std::string>());
  if (v.is_number()) return ctx.real(v.get<double>());
  throw std::invalid_argument("init file: entries must be strings or numbers");
}

}  // namespace

SeededInit parse_init_json(const std::string& text, const PrecisionContext& ctx) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("x0") || !j.contains("H0")) {
    throw std::invalid_argument("init file: expected keys x0 and H0");
  }
  const auto& jx = j["x0"];
  const int n = static_cast<int>(jx.size());
  if (n < 2) throw std::invalid_argument("init file: need n >= 2");
  Vector x0(n, ctx);
  for (int i = 0; i < n; ++i) x0[i] = json_number(jx[i], ctx);
  const auto& jH = j["H0"];
  if (static_cast<int>(jH.size()) != n) {
    throw std::invalid_argument("init file: H0 must be n rows");
  }
  SymMatrix H0(n, ctx);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(jH[i].size()) != n) {
      throw std::invalid_argument("init file: H0 must be n by n");
    }
    for (int jj = i; jj < n; ++jj) H0.set(i, jj, json_number(jH[i][jj], ctx));
  }
  // symmetry of the lower triangle against the stored upper one
  for (int i = 0; i < n; ++i) {
    for (int jj = 0; jj < i; ++jj) {
      if (json_number(jH[i][jj], ctx) != H0.at(i, jj)) {
        throw std::invalid_argument("init file: H0 is not symmetric");
      }
    }
  }
  return SeededInit{std::move(x0), std::move(H0)};
}

SeededInit read_init_file(const std::string& path, const PrecisionContext& ctx) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open init file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_init_json(buffer.str(), ctx);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// Property-suite drivers

SuiteResult suite_recursion(const std::vector<int>& dims, int runs_per_dim,
                            std::uint64_t seed, long precision_bits) {
  SuiteResult result;
  result.suite = "recursion";
  PrecisionContext ctx(precision_bits);
  const Real band = tolerance_band(ctx);
  Real max_dev = ctx.zero();
  LineSearchParams params = LineSearchParams::standard(ctx);
  int idx = 0;
  for (int n : dims) {
    for (int r = 0; r < runs_per_dim; ++r, ++idx) {
      std::uint64_t s = stream_seed(seed, idx);
      SeededInit init = make_seeded_init(n, s, ctx);
      PwlObjective obj = PwlObjective::canonical(n, ctx);
      RunOptions opts;
      opts.record.keep_vectors = false;
      opts.shadow_abort = false;  // measure, do not abort
      RunRecord rec = run(obj, init.x0, init.H0, params, ctx, opts);
      result.runs++;
      if (rec.max_shadow_dev > max_dev) max_dev = rec.max_shadow_dev;
      if (!within_band(ctx.zero(), rec.max_shadow_dev, band)) {
        result.failures++;
        result.notes.push_back("n=" + std::to_string(n) + " seed=" + std::to_string(s) +
                               " dev=" + rec.max_shadow_dev.to_decimal(8));
      }
    }
  }
  result.max_deviation = max_dev.to_decimal(8);
  return result;
}

SuiteResult suite_lemmas(const std::vector<int>& dims, int total_runs,
                         std::uint64_t seed, long precision_bits) {
  SuiteResult result;
  result.suite = "lemmas";
  PrecisionContext ctx(precision_bits);
  LineSearchParams params = LineSearchParams::standard(ctx);
  for (int i = 0; i < total_runs; ++i) {
    int n = dims[i % dims.size()];
    std::uint64_t s = stream_seed(seed, i);
    SeededInit init = make_seeded_init(n, s, ctx);
    PwlObjective obj = PwlObjective::canonical(n, ctx);
    RunOptions opts;
    opts.record.keep_vectors = false;
    RunRecord rec = run(obj, init.x0, init.H0, params, ctx, opts);
    result.runs++;
    InvariantReport report = verify_record(rec);
    if (!report.all_pass) {
      result.failures++;
      if (result.notes.size() < 16) {
        for (const CheckItem& item : report.items) {
          if (!item.pass) {
            result.notes.push_back("n=" + std::to_string(n) + " seed=" +
                                   std::to_string(s) + " " + item.name + " " + item.detail);
            break;
          }
        }
      }
    }
  }
  return result;
}

SuiteResult suite_prediction(const std::vector<int>& dims, int total_runs,
                             std::uint64_t seed, long precision_bits) {
  SuiteResult result;
  result.suite = "prediction";
  PrecisionContext ctx(precision_bits);
  LineSearchParams standard = LineSearchParams::standard(ctx);
  LineSearchParams degenerate = LineSearchParams::custom(ctx, "0", "1", true);
  for (int i = 0; i < total_runs; ++i) {
    int n = dims[i % dims.size()];
    std::uint64_t s = stream_seed(seed, i);
    SeededInit init = make_seeded_init(n, s, ctx);
    PwlObjective obj = PwlObjective::canonical(n, ctx);
    RunOptions opts;
    opts.record.keep_vectors = false;
    for (const LineSearchParams* p : {&standard, &degenerate}) {
      RunRecord rec = run(obj, init.x0, init.H0, *p, ctx, opts);
      result.runs++;
      TerminationPrediction pred = predict_termination(rec);
      if (!pred.item.pass) {
        result.failures++;
        if (result.notes.size() < 16) {
          result.notes.push_back("n=" + std::to_string(n) + " seed=" + std::to_string(s) +
                                 " " + pred.item.detail);
        }
      }
    }
  }
  return result;
}

SuiteResult suite_affine(const std::vector<int>& dims, int count,
                         std::uint64_t seed, long precision_bits) {
  SuiteResult result;
  result.suite = "affine";
  PrecisionContext ctx(precision_bits);
  LineSearchParams params = LineSearchParams::standard(ctx);
  Real max_dev = ctx.zero();
  for (int i = 0; i < count; ++i) {
    int n = dims[i % dims.size()];
    Rng rng(stream_seed(seed, i));
    // independent pair (dependent draws have probability zero; redraw anyway)
    Vector v1 = gaussian_vector(n, rng, ctx);
    Vector v2 = gaussian_vector(n, rng, ctx);
    while (exact_rank({v1, v2}) != 2) v2 = gaussian_vector(n, rng, ctx);
    PwlObjective g = make_general(v1, v2);
    SymMatrix H0 = gaussian_matrix(n, rng, ctx);
    Vector x0 = gaussian_vector(n, rng, ctx);
    while (g.kink_argument(x0).is_zero()) x0 = gaussian_vector(n, rng, ctx);
    EquivalenceVerdict verdict = equivalence_check(g, x0, H0, params, ctx, rng);
    result.runs++;
    if (verdict.max_deviation > max_dev) max_dev = verdict.max_deviation;
    if (!verdict.ok) {
      result.failures++;
      if (result.notes.size() < 16) {
        result.notes.push_back("n=" + std::to_string(n) + " i=" + std::to_string(i) +
                               " " + verdict.detail);
      }
    }
  }
  result.max_deviation = max_dev.to_decimal(8);
  return result;
}

SuiteResult suite_beta(const std::vector<std::string>& betas, int runs_each,
                       std::uint64_t seed, long precision_bits) {
  SuiteResult result;
  result.suite = "beta";
  PrecisionContext ctx(precision_bits);
  LineSearchParams params = LineSearchParams::standard(ctx);
  const int n = 3;
  int idx = 0;
  for (const std::string& beta_text : betas) {
    PwlObjective obj = PwlObjective::beta_family(n, ctx.real(beta_text), ctx);
    for (int r = 0; r < runs_each; ++r, ++idx) {
      std::uint64_t s = stream_seed(seed, idx);
      SeededInit init = make_seeded_init(n, s, ctx);
      RunOptions opts;
      opts.record.keep_vectors = false;
      RunRecord rec = run(obj, init.x0, init.H0, params, ctx, opts);
      result.runs++;
      if (rec.iterations() > 2 || rec.cause != TerminationCause::unbounded_direction) {
        result.failures++;
        if (result.notes.size() < 16) {
          result.notes.push_back("beta=" + beta_text + " seed=" + std::to_string(s) +
                                 " iterations=" + std::to_string(rec.iterations()));
        }
      }
    }
  }
  return result;
}

}  // namespace pwlbfgs
