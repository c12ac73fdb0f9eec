#include "cnc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace cnc {

int LinearProgram::add_variable(double objective) {
  objective_.push_back(objective);
  return static_cast<int>(objective_.size()) - 1;
}

int LinearProgram::add_row(double rhs) {
  if (!(rhs >= 0.0)) throw std::invalid_argument("LinearProgram: right-hand sides must be non-negative");
  rhs_.push_back(rhs);
  return static_cast<int>(rhs_.size()) - 1;
}

void LinearProgram::add_coefficient(int row, int col, double value) {
  if (row < 0 || static_cast<std::size_t>(row) >= rhs_.size() || col < 0 ||
      static_cast<std::size_t>(col) >= objective_.size()) {
    throw std::out_of_range("LinearProgram: coefficient index out of range");
  }
  if (value != 0.0) entries_.push_back({row, col, value});
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < objective_.size(); ++j) s += objective_[j] * x[j];
  return s;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
  std::vector<double> lhs(rhs_.size(), 0.0);
  for (const auto& e : entries_) lhs[e.row] += e.value * x[e.col];
  double worst = 0.0;
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    worst = std::max(worst, (lhs[i] - rhs_[i]) / std::max(1.0, std::abs(rhs_[i])));
  }
  for (double v : x) worst = std::max(worst, -v);
  return worst;
}

LpSolution RevisedSimplex::solve(const LinearProgram& lp) {
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_variables();
  LpSolution sol;
  sol.x.assign(n, 0.0);
  if (n == 0) return sol;

  // Row equilibration.
  std::vector<double> row_scale(m, 0.0);
  for (const auto& e : lp.entries()) row_scale[e.row] = std::max(row_scale[e.row], std::abs(e.value));
  for (auto& s : row_scale) s = s > 0.0 ? 1.0 / s : 1.0;

  // Compressed sparse columns of the scaled structural matrix.
  std::vector<std::size_t> col_start(n + 1, 0);
  for (const auto& e : lp.entries()) ++col_start[e.col + 1];
  for (std::size_t j = 0; j < n; ++j) col_start[j + 1] += col_start[j];
  std::vector<int> col_row(lp.entries().size());
  std::vector<double> col_val(lp.entries().size());
  {
    std::vector<std::size_t> fill(col_start.begin(), col_start.end() - 1);
    for (const auto& e : lp.entries()) {
      const std::size_t k = fill[e.col]++;
      col_row[k] = e.row;
      col_val[k] = e.value * row_scale[e.row];
    }
  }
  std::vector<double> b(m);
  for (std::size_t i = 0; i < m; ++i) b[i] = lp.rhs()[i] * row_scale[i];

  const auto& c = lp.objective();
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  const double opt_tol = options_.optimality_tolerance * std::max(1.0, cmax);
  const std::int64_t max_iter = options_.max_iterations > 0
                                    ? options_.max_iterations
                                    : 50 * static_cast<std::int64_t>(m + n) + 1000;

  // Variables: 0..n-1 structural, n..n+m-1 slacks.
  std::vector<std::size_t> basis(m);
  std::vector<long> where(n + m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    basis[i] = n + i;
    where[n + i] = static_cast<long>(i);
  }
  std::vector<double> binv(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) binv[i * m + i] = 1.0;
  std::vector<double> xb = b;
  std::vector<double> y(m, 0.0);
  std::vector<double> alpha(m, 0.0);
  std::vector<std::size_t> nz;
  nz.reserve(m);

  auto cost_of = [&](std::size_t var) { return var < n ? c[var] : 0.0; };
  auto refresh = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = &binv[i * m];
      for (std::size_t k = 0; k < m; ++k) s += row[k] * b[k];
      xb[i] = s;
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost_of(basis[i]);
      if (cb == 0.0) continue;
      const double* row = &binv[i * m];
      for (std::size_t k = 0; k < m; ++k) y[k] += cb * row[k];
    }
  };

  int degenerate_run = 0;
  bool bland = false;
  std::int64_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) {
      sol.status = LpStatus::IterationLimit;
      break;
    }
    if (iter > 0 && iter % 256 == 0) refresh();

    // Pricing.
    std::size_t entering = n + m;
    double best = opt_tol;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (where[j] >= 0) continue;
      double d;
      if (j < n) {
        d = c[j];
        for (std::size_t k = col_start[j]; k < col_start[j + 1]; ++k) d -= y[col_row[k]] * col_val[k];
      } else {
        d = -y[j - n];
      }
      if (d > best) {
        best = d;
        entering = j;
        if (bland) break;
      }
    }
    if (entering == n + m) break;
    const double dq = best;

    // alpha = B^-1 a_q
    nz.clear();
    double amax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = &binv[i * m];
      double s;
      if (entering < n) {
        s = 0.0;
        for (std::size_t k = col_start[entering]; k < col_start[entering + 1]; ++k) s += row[col_row[k]] * col_val[k];
      } else {
        s = row[entering - n];
      }
      alpha[i] = s;
      if (s != 0.0) {
        nz.push_back(i);
        amax = std::max(amax, std::abs(s));
      }
    }

    // Ratio test.
    const double ptol = options_.pivot_tolerance * std::max(amax, 1e-300);
    std::size_t leave = m;
    double theta = 0.0;
    for (std::size_t i : nz) {
      if (alpha[i] <= ptol) continue;
      const double ratio = std::max(xb[i], 0.0) / alpha[i];
      if (leave == m) {
        leave = i;
        theta = ratio;
        continue;
      }
      const double slack = 1e-12 * std::max(1.0, theta);
      if (ratio < theta - slack) {
        leave = i;
        theta = ratio;
      } else if (ratio <= theta + slack) {
        const bool better = bland ? basis[i] < basis[leave] : alpha[i] > alpha[leave];
        if (better) {
          leave = i;
          theta = std::min(theta, ratio);
        }
      }
    }
    if (leave == m) {
      sol.status = LpStatus::Unbounded;
      break;
    }

    if (theta <= 1e-12) {
      if (++degenerate_run >= options_.degenerate_switch) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    // Primal step.
    for (std::size_t i : nz) xb[i] -= theta * alpha[i];
    xb[leave] = theta;

    // Dual update uses the old pivot row.
    const double ar = alpha[leave];
    {
      const double f = dq / ar;
      const double* prow = &binv[leave * m];
      for (std::size_t k = 0; k < m; ++k) y[k] += f * prow[k];
    }
    // Basis inverse update restricted to rows touched by alpha.
    {
      double* prow = &binv[leave * m];
      const double inv = 1.0 / ar;
      for (std::size_t k = 0; k < m; ++k) prow[k] *= inv;
      for (std::size_t i : nz) {
        if (i == leave) continue;
        const double f = alpha[i];
        double* row = &binv[i * m];
        for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
    }
    where[basis[leave]] = -1;
    basis[leave] = entering;
    where[entering] = static_cast<long>(leave);
  }

  refresh();
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = std::max(0.0, xb[i]);
  }
  sol.iterations = iter;
  sol.objective = lp.evaluate(sol.x);
  return sol;
}

std::unique_ptr<LpSolver> make_default_solver() { return std::make_unique<RevisedSimplex>(); }

void write_lp_text(std::ostream& os, const LinearProgram& lp, const std::vector<std::string>& var_names,
                   const std::vector<std::string>& row_names, const LpSolution* solution) {
  auto var = [&](std::size_t j) { return j < var_names.size() ? var_names[j] : "x" + std::to_string(j); };
  auto row = [&](std::size_t i) { return i < row_names.size() ? row_names[i] : "r" + std::to_string(i); };
  os << std::setprecision(17);
  os << "maximize\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    if (lp.objective()[j] != 0.0) os << "  " << lp.objective()[j] << " " << var(j) << "\n";
  }
  std::vector<std::vector<std::pair<int, double>>> rows(lp.num_rows());
  for (const auto& e : lp.entries()) rows[e.row].emplace_back(e.col, e.value);
  os << "subject to\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    os << "  " << row(i) << ":";
    for (const auto& [col, v] : rows[i]) os << " " << (v >= 0 ? "+" : "") << v << " " << var(col);
    os << " <= " << lp.rhs()[i] << "\n";
  }
  os << "bounds\n  all variables >= 0\n";
  if (solution) {
    os << "solution objective " << solution->objective << " iterations " << solution->iterations << "\n";
    for (std::size_t j = 0; j < solution->x.size(); ++j) {
      if (solution->x[j] != 0.0) os << "  " << var(j) << " = " << solution->x[j] << "\n";
    }
  }
  os << "end\n";
}

}  // namespace cnc
