#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "vrtpp/harness.hpp"

using namespace vrtpp;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("gap to ideal profit") {
  std::vector<double> p{2, 3, 5};
  CHECK(gap_to_ideal(10.0, p) == doctest::Approx(0.0));
  CHECK(gap_to_ideal(0.0, p) == doctest::Approx(100.0));
  CHECK(gap_to_ideal(5.0, p) == doctest::Approx(50.0));
  // case-study arithmetic: 10 - 0.0005 * 1337.94
  std::vector<double> cs{2, 1, 3, 1, 3};
  CHECK(gap_to_ideal(10.0 - 0.0005 * 1337.94, cs) == doctest::Approx(6.6897).epsilon(1e-4));
  CHECK_THROWS_AS(gap_to_ideal(1.0, {}), ZeroIdealProfit);
  CHECK_THROWS_AS(gap_to_ideal(1.0, {0.0, 0.0}), ZeroIdealProfit);
}

TEST_CASE("record fields mirror the solution") {
  Scenario scn = generate_instance(3, 1, 2);
  MissionSolution sol;
  sol.method = "path";
  sol.objective = 1.5;
  sol.profit = 2.0;
  sol.initial_propellant_kg = 400.0;
  sol.refuel_kg = 100.0;
  sol.vehicles_used = 1;
  sol.targets_visited = 2;
  sol.wall_time_s = 0.25;
  sol.converged = true;
  RunRecord r = record_from("x", sol, scn);
  CHECK(r.method == "path");
  CHECK(!r.trivial);
  CHECK(r.converged);
  CHECK(r.g_ideal == doctest::Approx(gap_to_ideal(1.5, scn.profit)));
  sol.targets_visited = 0;
  CHECK(record_from("x", sol, scn).trivial);
}

TEST_CASE("benchmark determinism and worker-order independence") {
  BenchResult a = run_benchmark({1}, {2}, 2, 42, 1);
  BenchResult b = run_benchmark({1}, {2}, 2, 42, 2);
  REQUIRE(a.runs.size() == 2);
  CHECK(runs_csv(flatten(a)) == runs_csv(flatten(b)));
  CHECK(summary_csv(a) == summary_csv(b));
  CHECK(parity_csv(a) == parity_csv(b));

  for (const BenchRun& run : a.runs) {
    Scenario scn = generate_instance(run.seed, run.n_r, run.n_t);
    for (const RunRecord* r : {&run.arc, &run.path}) {
      CHECK((r->targets == 0) == r->trivial);
      CHECK(r->wall_s > 0.0);
      CHECK(r->g_ideal == doctest::Approx(gap_to_ideal(r->objective, scn.profit)));
    }
    // reported objective is the stated profit / propellant arithmetic
    for (const MissionSolution* s : {&run.arc_sol, &run.path_sol})
      if (s->feasible)
        CHECK(s->objective == doctest::Approx(s->profit - scn.lambda * (s->initial_propellant_kg +
                                                                        s->refuel_kg))
                                  .epsilon(1e-9));
  }
}

TEST_CASE("summary stats match a recomputation from the raw rows") {
  BenchResult b;
  // hand-built records: no solver involved
  for (int i = 0; i < 3; ++i) {
    BenchRun run;
    run.n_r = 1;
    run.n_t = 4;
    run.instance = "r1_t4_i0" + std::to_string(i);
    run.arc = {run.instance, "arc", 0, 0, 0, 0, 1, 1, 1.0 + i, false, i != 1, 10.0 * i};
    run.path = {run.instance, "path", 0, 0, 0, 0, 1, 1, 0.5, false, true, 5.0};
    b.runs.push_back(run);
  }
  auto rows = parse_csv(summary_csv(b));
  REQUIRE(rows.size() == 3);  // header + arc + path
  CHECK(rows[0][0] == "n_r");
  // arc row: mean time of {1,2,3}, mean gap of {0,10,20}, one non-converged
  CHECK(std::stod(rows[1][4]) == doctest::Approx(2.0));
  CHECK(std::stod(rows[1][5]) == doctest::Approx(1.0));
  CHECK(std::stod(rows[1][6]) == doctest::Approx(10.0));
  CHECK(std::stod(rows[1][7]) == doctest::Approx(10.0));
  CHECK(rows[1][9] == "1");
  // path row: constant columns
  CHECK(std::stod(rows[2][4]) == doctest::Approx(0.5));
  CHECK(std::stod(rows[2][5]) == doctest::Approx(0.0));
  CHECK(rows[2][9] == "0");
  // parity drops the non-converged arc pair
  auto parity = parse_csv(parity_csv(b));
  REQUIRE(parity.size() == 3);  // header + 2 rows
  CHECK(parity[1][0] == "r1_t4_i00");
  CHECK(parity[2][0] == "r1_t4_i02");

  auto raw = parse_csv(runs_csv(flatten(b)));
  REQUIRE(raw.size() == 7);
  double arc_time = 0;
  int arc_rows = 0;
  for (size_t i = 1; i < raw.size(); ++i)
    if (raw[i][1] == "arc") {
      arc_time += std::stod(raw[i][8]);
      ++arc_rows;
    }
  CHECK(arc_rows == 3);
  CHECK(arc_time / arc_rows == doctest::Approx(std::stod(rows[1][4])));
}
