#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace vrtpp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Rel { LE, EQ, GE };

struct Var {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  double obj = 0.0;
  bool is_binary = false;
};

struct Row {
  std::vector<std::pair<int, double>> coeffs;  // (var index, coefficient)
  Rel rel = Rel::LE;
  double rhs = 0.0;
};

// Maximization model over bounded continuous/binary variables.
struct LinearModel {
  std::vector<Var> vars;
  std::vector<Row> rows;

  int add_var(const std::string& name, double lb, double ub, double obj);
  int add_binary(const std::string& name, double obj);
  void add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs);
  void validate() const;  // throws std::invalid_argument on structural errors
};

enum class SolveStatus { Optimal, FeasibleTimeLimit, Infeasible, Unbounded };

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> duals;  // one per row, LP solves only
  double bound = 0.0;         // best bound, MIP solves only

  bool feasible() const {
    return status == SolveStatus::Optimal || status == SolveStatus::FeasibleTimeLimit;
  }
};

// Variable statuses (structurals then slacks) describing a simplex basis;
// passed between solves to warm start branch-and-bound nodes.
using SimplexBasis = std::vector<unsigned char>;

// Revised simplex; binaries are treated as their [0,1] relaxation.
SolveOutcome solve_lp(const LinearModel& m);

// LP solve with per-variable bound overrides (branch-and-bound nodes).
SolveOutcome solve_lp_bounded(const LinearModel& m, const std::vector<double>& lb,
                              const std::vector<double>& ub,
                              const SimplexBasis* warm = nullptr,
                              SimplexBasis* basis_out = nullptr);

// Reusable simplex over one model: repeated solves with different variable
// bounds continue from the previous basis, so branch-and-bound nodes cost a
// handful of pivots instead of a refactorization.
class SimplexEngine {
 public:
  explicit SimplexEngine(const LinearModel& m);
  ~SimplexEngine();
  SolveOutcome solve(const std::vector<double>& lb, const std::vector<double>& ub);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Best-bound branch and bound over the binary variables.
SolveOutcome solve_mip(const LinearModel& m, double time_limit_s);

// CPLEX LP-format dump for external cross-checks.
std::string lp_format(const LinearModel& m);

}  // namespace vrtpp
