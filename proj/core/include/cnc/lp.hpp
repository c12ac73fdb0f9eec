#pragma once

// Linear programs of the form  max c'x  s.t.  Ax <= b, x >= 0, b >= 0,
// and a bundled revised simplex solver.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace cnc {

class LinearProgram {
 public:
  struct Entry {
    int row = 0;
    int col = 0;
    double value = 0.0;
  };

  int add_variable(double objective);
  int add_row(double rhs);
  void add_coefficient(int row, int col, double value);

  std::size_t num_variables() const { return objective_.size(); }
  std::size_t num_rows() const { return rhs_.size(); }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<Entry>& entries() const { return entries_; }

  double evaluate(const std::vector<double>& x) const;
  // Largest violation of Ax <= b or x >= 0, each row measured relative to
  // max(1, |b|).
  double max_violation(const std::vector<double>& x) const;

 private:
  std::vector<double> objective_;
  std::vector<double> rhs_;
  std::vector<Entry> entries_;
};

enum class LpStatus : std::uint8_t { Optimal, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  std::vector<double> x;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual LpSolution solve(const LinearProgram& lp) = 0;
};

struct SimplexOptions {
  double optimality_tolerance = 1e-9;  // relative to max |c|
  double pivot_tolerance = 1e-9;       // relative to the largest |alpha| in the column
  std::int64_t max_iterations = 0;     // 0: 50 * (rows + cols) + 1000
  int degenerate_switch = 50;          // degenerate pivots before Bland's rule takes over
};

// Revised simplex with an explicit dense basis inverse, sparse columns and
// row equilibration. Starts from the all-slack basis (feasible since b >= 0).
// Dantzig pricing; Bland's rule during runs of degenerate pivots.
class RevisedSimplex final : public LpSolver {
 public:
  explicit RevisedSimplex(SimplexOptions options = {}) : options_(options) {}
  LpSolution solve(const LinearProgram& lp) override;

 private:
  SimplexOptions options_;
};

std::unique_ptr<LpSolver> make_default_solver();

// Plain-text dump: objective, one line per row, optional solution.
void write_lp_text(std::ostream& os, const LinearProgram& lp, const std::vector<std::string>& var_names = {},
                   const std::vector<std::string>& row_names = {}, const LpSolution* solution = nullptr);

}  // namespace cnc
