#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "doctest.h"
#include "pwlbfgs/experiments.hpp"

using namespace pwlbfgs;

namespace {

const PrecisionContext& ctx() {
  static PrecisionContext c = make_context(1664);
  return c;
}

RunRecord example_record(const char* c1 = "1e-4", const char* c2 = "0.5",
                         bool degenerate = false) {
  SeededInit init = read_init_file(
      std::string(PWLBFGS_SOURCE_DIR) + "/data/example3d.json", ctx());
  PwlObjective f = PwlObjective::canonical(3, ctx());
  LineSearchParams params = LineSearchParams::custom(ctx(), c1, c2, degenerate);
  return run(f, init.x0, init.H0, params, ctx());
}

}  // namespace

TEST_CASE("seeded initialization is deterministic and seed-sensitive") {
  SeededInit a = make_seeded_init(4, 99, ctx());
  SeededInit b = make_seeded_init(4, 99, ctx());
  SeededInit c = make_seeded_init(4, 100, ctx());
  CHECK(a.x0[0] == b.x0[0]);
  CHECK(a.H0.at(2, 3) == b.H0.at(2, 3));
  CHECK(a.x0[0] != c.x0[0]);
  CHECK(spd_check(a.H0).positive_definite);
  CHECK_FALSE(a.x0[0].is_zero());
}

TEST_CASE("ensemble results do not depend on the job count") {
  EnsembleConfig config;
  config.n = 2;
  config.runs = 120;
  config.seed = 2718;
  config.jobs = 1;
  EnsembleStats serial = run_ensemble(config);
  config.jobs = 2;
  EnsembleStats threaded = run_ensemble(config);
  CHECK(serial.to_json_string() == threaded.to_json_string());
  CHECK(serial.per_run_csv == threaded.per_run_csv);
  CHECK(serial.count_unbounded == 120);
  CHECK(serial.min_iterations >= 1);
  CHECK(serial.min_iterations <= serial.median_iterations);
  CHECK(serial.median_iterations <= serial.max_iterations);
  CHECK(serial.mean_iterations >= serial.min_iterations);
  CHECK(serial.mean_iterations <= serial.max_iterations);
  long long total = 0;
  for (const auto& [count, freq] : serial.histogram) total += freq;
  CHECK(total == 120);
}

TEST_CASE("ensemble verification flags no violations") {
  EnsembleConfig config;
  config.n = 3;
  config.runs = 40;
  config.seed = 11;
  config.verify = true;
  EnsembleStats stats = run_ensemble(config);
  CHECK(stats.verified_runs == 40);
  CHECK(stats.violations == 0);
}

TEST_CASE("trace CSV layout and absent-value cells") {
  RunRecord rec = example_record();
  TraceFormat fmt;
  std::string csv = trace_csv(rec, fmt);
  CHECK(csv.rfind("k,alpha,f,x1,ee,ez,zz,D_recursion,D_direct,zx,delta,alpha_star,"
                  "a,psi,gamma,log_delta_psi,log_a,log_psi,ls_trials\n", 0) == 0);
  // one header plus one row per recorded iteration
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(rec.rows.size()));
  // the final row has an empty step-size cell
  size_t last = csv.rfind("\n10,");
  CHECK(last == std::string::npos);  // rows stop at k = 9
  CHECK(csv.rfind("\n9,,") != std::string::npos);
}

TEST_CASE("hex columns replay exactly") {
  RunRecord rec = example_record();
  TraceFormat fmt;
  fmt.hex = true;
  std::string csv = trace_csv(rec, fmt);
  std::istringstream lines(csv);
  std::string header, row0;
  std::getline(lines, header);
  std::getline(lines, row0);
  CHECK(header.find(",alpha_hex,") != std::string::npos);
  size_t pos = row0.find(",0x");
  REQUIRE(pos != std::string::npos);
  std::string alpha_hex = row0.substr(pos + 1, row0.find(',', pos + 1) - pos - 1);
  CHECK(ctx().real(alpha_hex) == *rec.rows[0].alpha);
}

TEST_CASE("summary and figure are deterministic byte for byte") {
  RunRecord rec1 = example_record();
  RunRecord rec2 = example_record();
  InvariantReport rep1 = verify_record(rec1);
  InvariantReport rep2 = verify_record(rec2);
  CHECK(trace_csv(rec1, TraceFormat{}) == trace_csv(rec2, TraceFormat{}));
  CHECK(summary_json(rec1, rep1, nullptr) == summary_json(rec2, rep2, nullptr));
  CHECK(figure_svg(rec1) == figure_svg(rec2));
  CHECK(rep1.to_json_string() == rep2.to_json_string());
}

TEST_CASE("summary carries termination and config echo") {
  RunRecord rec = example_record();
  InvariantReport report = verify_record(rec);
  SeededInit init = read_init_file(
      std::string(PWLBFGS_SOURCE_DIR) + "/data/example3d.json", ctx());
  std::string json = summary_json(rec, report, &init);
  CHECK(json.find("\"index\": 9") != std::string::npos);
  CHECK(json.find("\"iterations\": 10") != std::string::npos);
  CHECK(json.find("\"cause\": \"unbounded_direction\"") != std::string::npos);
  CHECK(json.find("\"init_echo\"") != std::string::npos);
  // full-precision echo of the parsed value, good for exact replay
  CHECK(json.find("1.2461299999999999") != std::string::npos);
  SeededInit replayed = parse_init_json(
      nlohmann::json::parse(json)["init_echo"].dump(), ctx());
  CHECK(replayed.x0[0] == init.x0[0]);
  CHECK(replayed.H0.at(1, 2) == init.H0.at(1, 2));
}

TEST_CASE("figure contains the three labelled series") {
  std::string svg = figure_svg(example_record());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("log(delta*psi)") != std::string::npos);
  CHECK(svg.find("log(a)") != std::string::npos);
  CHECK(svg.find("log(psi)") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("init files round-trip and reject malformed input") {
  SeededInit init = make_seeded_init(3, 404, ctx());
  std::string text = init_file_json(init);
  SeededInit parsed = parse_init_json(text, ctx());
  CHECK(parsed.x0[0] == init.x0[0]);
  CHECK(parsed.H0.at(0, 2) == init.H0.at(0, 2));

  CHECK_THROWS(parse_init_json("{\"x0\": [\"1\", \"2\"]}", ctx()));
  CHECK_THROWS(parse_init_json(
      "{\"x0\": [\"1\", \"2\"], \"H0\": [[\"1\", \"2\"], [\"3\", \"4\"]]}", ctx()));
  // plain numbers are accepted at binary64 granularity
  SeededInit num = parse_init_json(
      "{\"x0\": [1.5, 2], \"H0\": [[2, 0.5], [0.5, 1]]}", ctx());
  CHECK(num.x0[0] == ctx().real("1.5"));
}

TEST_CASE("verification suites pass at smoke scale") {
  SuiteResult rec = suite_recursion({2, 3}, 4, 1, 1664);
  CHECK(rec.pass());
  CHECK(rec.runs == 8);

  SuiteResult lem = suite_lemmas({2, 3, 5}, 15, 2, 1664);
  CHECK(lem.pass());

  SuiteResult pred = suite_prediction({2, 3}, 6, 3, 1664);
  CHECK(pred.pass());
  CHECK(pred.runs == 12);  // standard and degenerate per seed

  SuiteResult aff = suite_affine({2, 3}, 4, 4, 1664);
  CHECK(aff.pass());

  SuiteResult beta = suite_beta({"2", "-2"}, 4, 5, 1664);
  CHECK(beta.pass());
  CHECK(beta.runs == 8);
}
