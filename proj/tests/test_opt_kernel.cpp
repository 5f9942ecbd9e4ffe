#include <cmath>
#include <random>

#include "doctest.h"
#include "vrtpp/linmodel.hpp"

using namespace vrtpp;

namespace {

constexpr double kTol = 1e-6;

double row_value(const LinearModel& m, const Row& r, const std::vector<double>& x) {
  double v = 0;
  for (const auto& [j, c] : r.coeffs) v += c * x[j];
  return v;
}

// Full KKT certificate for a maximization LP: primal/dual feasibility,
// complementary slackness, and strong duality via the Lagrangian identity.
void check_lp_certificate(const LinearModel& m, const SolveOutcome& out) {
  REQUIRE(out.status == SolveStatus::Optimal);
  REQUIRE(out.x.size() == m.vars.size());
  REQUIRE(out.duals.size() == m.rows.size());

  for (size_t j = 0; j < m.vars.size(); ++j) {
    CHECK(out.x[j] >= m.vars[j].lb - kTol);
    CHECK(out.x[j] <= m.vars[j].ub + kTol);
  }
  for (size_t i = 0; i < m.rows.size(); ++i) {
    double v = row_value(m, m.rows[i], out.x);
    double y = out.duals[i];
    switch (m.rows[i].rel) {
      case Rel::LE:
        CHECK(v <= m.rows[i].rhs + kTol);
        CHECK(y >= -kTol);
        if (v < m.rows[i].rhs - kTol) CHECK(std::fabs(y) < kTol);
        break;
      case Rel::GE:
        CHECK(v >= m.rows[i].rhs - kTol);
        CHECK(y <= kTol);
        if (v > m.rows[i].rhs + kTol) CHECK(std::fabs(y) < kTol);
        break;
      case Rel::EQ:
        CHECK(std::fabs(v - m.rows[i].rhs) < kTol);
        break;
    }
  }
  // reduced costs and strong duality
  double dual_obj = 0;
  for (size_t i = 0; i < m.rows.size(); ++i) dual_obj += out.duals[i] * m.rows[i].rhs;
  for (size_t j = 0; j < m.vars.size(); ++j) {
    double d = m.vars[j].obj;
    for (size_t i = 0; i < m.rows.size(); ++i)
      for (const auto& [k, c] : m.rows[i].coeffs)
        if (k == static_cast<int>(j)) d -= out.duals[i] * c;
    bool at_lb = out.x[j] < m.vars[j].lb + kTol;
    bool at_ub = out.x[j] > m.vars[j].ub - kTol;
    if (!at_lb && !at_ub) CHECK(std::fabs(d) < kTol);
    if (at_lb && !at_ub) CHECK(d < kTol);
    if (at_ub && !at_lb) CHECK(d > -kTol);
    dual_obj += d * out.x[j];  // at bounds or d ~ 0, so this is the bound term
  }
  CHECK(std::fabs(out.objective - dual_obj) < kTol * (1.0 + std::fabs(out.objective)));
}

LinearModel random_lp(std::mt19937_64& rng, bool binaries) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> nn(1, binaries ? 10 : 6), mm(1, 6);
  int n = nn(rng), m = mm(rng);
  LinearModel lm;
  for (int j = 0; j < n; ++j) {
    if (binaries)
      lm.add_binary("x" + std::to_string(j), 2.0 * u(rng));
    else
      lm.add_var("x" + std::to_string(j), 0.0, 2.0 + u(rng), 2.0 * u(rng));
  }
  // rhs anchored at a random interior point so the model stays feasible
  std::vector<double> xa(n);
  for (int j = 0; j < n; ++j) xa[j] = binaries ? (u(rng) > 0 ? 1.0 : 0.0) : 0.5 * (1.0 + u(rng));
  std::uniform_int_distribution<int> rel3(0, 2);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> co;
    double v = 0;
    for (int j = 0; j < n; ++j) {
      double c = u(rng);
      if (std::fabs(c) < 0.2) continue;
      co.push_back({j, c});
      v += c * xa[j];
    }
    if (co.empty()) continue;
    int rel = binaries ? 0 : rel3(rng);
    if (rel == 0)
      lm.add_row(co, Rel::LE, v + std::fabs(u(rng)));
    else if (rel == 1)
      lm.add_row(co, Rel::GE, v - std::fabs(u(rng)));
    else
      lm.add_row(co, Rel::EQ, v);
  }
  lm.validate();
  return lm;
}

}  // namespace

TEST_CASE("scalar lp with a binding row") {
  LinearModel m;
  m.add_var("x", 0.0, kInf, 1.0);
  m.add_row({{0, 1.0}}, Rel::LE, 3.0);
  SolveOutcome out = solve_lp(m);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.x[0] == doctest::Approx(3.0));
  CHECK(out.objective == doctest::Approx(3.0));
  CHECK(out.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("lp statuses") {
  LinearModel unb;
  unb.add_var("x", 0.0, kInf, 1.0);
  CHECK(solve_lp(unb).status == SolveStatus::Unbounded);

  LinearModel inf;
  inf.add_var("x", 0.0, kInf, 1.0);
  inf.add_row({{0, 1.0}}, Rel::LE, -1.0);
  CHECK(solve_lp(inf).status == SolveStatus::Infeasible);

  LinearModel eq;
  eq.add_var("x", 0.0, 10.0, 1.0);
  eq.add_var("y", 0.0, 10.0, -1.0);
  eq.add_row({{0, 1.0}, {1, 1.0}}, Rel::EQ, 4.0);
  SolveOutcome out = solve_lp(eq);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.objective == doctest::Approx(4.0));
  CHECK(out.x[0] == doctest::Approx(4.0));
}

TEST_CASE("degenerate lp with redundant rows stays consistent") {
  LinearModel m;
  m.add_var("x", 0.0, kInf, 2.0);
  m.add_var("y", 0.0, kInf, 1.0);
  m.add_row({{0, 1.0}, {1, 1.0}}, Rel::LE, 5.0);
  m.add_row({{0, 1.0}, {1, 1.0}}, Rel::LE, 5.0);  // duplicate
  m.add_row({{0, 2.0}, {1, 2.0}}, Rel::LE, 10.0);  // scaled duplicate
  SolveOutcome out = solve_lp(m);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.objective == doctest::Approx(10.0));
  check_lp_certificate(m, out);
}

TEST_CASE("random lps satisfy strong duality and complementary slackness") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    LinearModel m = random_lp(rng, false);
    SolveOutcome out = solve_lp(m);
    check_lp_certificate(m, out);
  }
}

TEST_CASE("lp solves are deterministic") {
  std::mt19937_64 rng(5);
  LinearModel m = random_lp(rng, false);
  SolveOutcome a = solve_lp(m), b = solve_lp(m);
  REQUIRE(a.status == b.status);
  for (size_t j = 0; j < a.x.size(); ++j) CHECK(a.x[j] == b.x[j]);
  for (size_t i = 0; i < a.duals.size(); ++i) CHECK(a.duals[i] == b.duals[i]);
}

TEST_CASE("knapsack matches brute force") {
  const double w[5] = {2, 3, 4, 5, 9};
  const double p[5] = {3, 4, 5, 8, 10};
  LinearModel m;
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 5; ++j) {
    m.add_binary("x" + std::to_string(j), p[j]);
    row.push_back({j, w[j]});
  }
  m.add_row(row, Rel::LE, 10.0);
  SolveOutcome out = solve_mip(m, 10.0);
  REQUIRE(out.status == SolveStatus::Optimal);

  double best = 0;
  for (int mask = 0; mask < 32; ++mask) {
    double wt = 0, pr = 0;
    for (int j = 0; j < 5; ++j)
      if (mask >> j & 1) wt += w[j], pr += p[j];
    if (wt <= 10.0) best = std::max(best, pr);
  }
  CHECK(out.objective == doctest::Approx(best));
  CHECK(out.objective <= out.bound + 1e-6);
}

TEST_CASE("mip with binaries fixed by bounds reduces to the lp") {
  LinearModel m;
  m.add_binary("a", 3.0);
  m.add_binary("b", -1.0);
  m.add_var("x", 0.0, 4.0, 1.0);
  m.vars[0].lb = 1.0;  // a fixed to 1
  m.vars[1].ub = 0.0;  // b fixed to 0
  m.add_row({{0, 1.0}, {2, 1.0}}, Rel::LE, 3.0);
  SolveOutcome mip = solve_mip(m, 10.0);
  SolveOutcome lp = solve_lp(m);
  REQUIRE(mip.status == SolveStatus::Optimal);
  CHECK(mip.objective == doctest::Approx(lp.objective));
  CHECK(mip.x[0] == 1.0);
  CHECK(mip.x[1] == 0.0);
}

TEST_CASE("random binary programs match exhaustive enumeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    LinearModel m = random_lp(rng, true);
    int n = static_cast<int>(m.vars.size());
    double best = -kInf;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
      bool ok = true;
      for (const Row& r : m.rows) {
        double v = row_value(m, r, x);
        if (r.rel == Rel::LE && v > r.rhs + 1e-9) ok = false;
        if (r.rel == Rel::GE && v < r.rhs - 1e-9) ok = false;
        if (r.rel == Rel::EQ && std::fabs(v - r.rhs) > 1e-9) ok = false;
      }
      if (!ok) continue;
      double obj = 0;
      for (int j = 0; j < n; ++j) obj += m.vars[j].obj * x[j];
      best = std::max(best, obj);
    }
    SolveOutcome out = solve_mip(m, 30.0);
    if (best == -kInf) {
      CHECK(out.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(out.status == SolveStatus::Optimal);
      CHECK(std::fabs(out.objective - best) < 1e-6);
      CHECK(out.objective <= out.bound + 1e-6);
      for (int j = 0; j < n; ++j)
        CHECK(std::fabs(out.x[j] - std::round(out.x[j])) < 1e-9);
    }
  }
}

TEST_CASE("mixed binary-continuous mip matches fix-and-solve enumeration") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    LinearModel m;
    int nb = 3, nc = 2;
    for (int j = 0; j < nb; ++j) m.add_binary("b" + std::to_string(j), 2.0 * u(rng));
    for (int j = 0; j < nc; ++j) m.add_var("c" + std::to_string(j), 0.0, 2.0, u(rng) + 0.5);
    for (int i = 0; i < 3; ++i) {
      std::vector<std::pair<int, double>> co;
      for (int j = 0; j < nb + nc; ++j) co.push_back({j, u(rng)});
      m.add_row(co, Rel::LE, 1.5 + u(rng));
    }
    double best = -kInf;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      std::vector<double> lb(nb + nc), ub(nb + nc);
      for (int j = 0; j < nb + nc; ++j) {
        lb[j] = m.vars[j].lb;
        ub[j] = m.vars[j].ub;
      }
      for (int j = 0; j < nb; ++j) lb[j] = ub[j] = (mask >> j) & 1;
      SolveOutcome r = solve_lp_bounded(m, lb, ub);
      if (r.status == SolveStatus::Optimal) best = std::max(best, r.objective);
    }
    SolveOutcome out = solve_mip(m, 30.0);
    if (best == -kInf) {
      CHECK(out.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(out.status == SolveStatus::Optimal);
      CHECK(std::fabs(out.objective - best) < 1e-6);
    }
  }
}

TEST_CASE("model validation catches structural errors") {
  LinearModel m;
  m.add_var("x", 0.0, 1.0, 1.0);
  m.add_var("x", 0.0, 1.0, 1.0);  // duplicate name
  CHECK_THROWS(m.validate());

  LinearModel m2;
  m2.add_var("x", 2.0, 1.0, 1.0);  // empty interval
  CHECK_THROWS(m2.validate());

  LinearModel m3;
  m3.add_var("x", 0.0, 1.0, 1.0);
  m3.add_row({{5, 1.0}}, Rel::LE, 1.0);  // undeclared variable
  CHECK_THROWS(m3.validate());
}

TEST_CASE("lp format dump contains the model") {
  LinearModel m;
  m.add_var("alpha", 0.0, 2.0, 1.5);
  m.add_binary("use", -0.5);
  m.add_row({{0, 1.0}, {1, -3.0}}, Rel::LE, 2.0);
  std::string txt = lp_format(m);
  CHECK(txt.find("Maximize") != std::string::npos);
  CHECK(txt.find("Subject To") != std::string::npos);
  CHECK(txt.find("alpha") != std::string::npos);
  CHECK(txt.find("Binaries") != std::string::npos);
  CHECK(txt.find("use") != std::string::npos);
  CHECK(txt.find("End") != std::string::npos);
}
