#include <doctest.h>

#include <random>
#include <sstream>

#include "cnc/lp.hpp"
#include "oracles.hpp"

using namespace cnc;

TEST_CASE("one-variable LP with a capacity and a backlog row") {
  LinearProgram lp;
  const int x = lp.add_variable(1.0);
  const int cap = lp.add_row(10.0);
  const int avail = lp.add_row(3.0);
  lp.add_coefficient(cap, x, 1.0);
  lp.add_coefficient(avail, x, 1.0);
  RevisedSimplex solver;
  const auto sol = solver.solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(oracle::vertex_enumeration(lp) == doctest::Approx(3.0));
}

TEST_CASE("textbook two-variable LP") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  LinearProgram lp;
  const int x = lp.add_variable(3.0), y = lp.add_variable(5.0);
  const int r1 = lp.add_row(4.0), r2 = lp.add_row(12.0), r3 = lp.add_row(18.0);
  lp.add_coefficient(r1, x, 1.0);
  lp.add_coefficient(r2, y, 2.0);
  lp.add_coefficient(r3, x, 3.0);
  lp.add_coefficient(r3, y, 2.0);
  const auto sol = RevisedSimplex().solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.x[1] == doctest::Approx(6.0));
  CHECK(sol.objective == doctest::Approx(36.0));
  CHECK(lp.evaluate(sol.x) == doctest::Approx(36.0));
  CHECK(lp.max_violation(sol.x) <= 1e-12);
}

TEST_CASE("unbounded and trivial programs") {
  LinearProgram lp;
  lp.add_variable(1.0);
  CHECK(RevisedSimplex().solve(lp).status == LpStatus::Unbounded);

  LinearProgram empty;
  const auto sol = RevisedSimplex().solve(empty);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == 0.0);

  LinearProgram neg;
  neg.add_variable(-1.0);
  const auto s2 = RevisedSimplex().solve(neg);
  CHECK(s2.status == LpStatus::Optimal);
  CHECK(s2.x[0] == 0.0);
}

TEST_CASE("degenerate program with zero right-hand sides") {
  LinearProgram lp;
  const int x = lp.add_variable(1.0), y = lp.add_variable(1.0);
  const int r0 = lp.add_row(0.0), r1 = lp.add_row(0.0), r2 = lp.add_row(5.0);
  lp.add_coefficient(r0, x, 1.0);
  lp.add_coefficient(r0, y, -1.0);
  lp.add_coefficient(r1, y, 1.0);
  lp.add_coefficient(r1, x, -1.0);
  lp.add_coefficient(r2, x, 1.0);
  lp.add_coefficient(r2, y, 1.0);
  const auto sol = RevisedSimplex().solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(5.0));
  CHECK(sol.x[0] == doctest::Approx(2.5));
}

TEST_CASE("simplex matches vertex enumeration on 200 random LPs") {
  std::mt19937_64 rng(77);
  RevisedSimplex solver;
  for (int seed = 0; seed < 200; ++seed) {
    const auto lp = oracle::random_lp(rng, 5, 4);
    const auto sol = solver.solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    const double ref = oracle::vertex_enumeration(lp);
    CHECK(std::abs(sol.objective - ref) <= 1e-7 * std::max(1.0, std::abs(ref)));
    CHECK(lp.max_violation(sol.x) <= 1e-9);
  }
}

TEST_CASE("Bland fallback reaches the same optimum") {
  std::mt19937_64 rng(3);
  SimplexOptions opts;
  opts.degenerate_switch = 0;
  RevisedSimplex bland(opts), dantzig;
  for (int i = 0; i < 50; ++i) {
    const auto lp = oracle::random_lp(rng, 6, 5);
    CHECK(bland.solve(lp).objective == doctest::Approx(dantzig.solve(lp).objective));
  }
}

TEST_CASE("iteration limit is reported") {
  LinearProgram lp;
  const int x = lp.add_variable(3.0), y = lp.add_variable(5.0);
  const int r1 = lp.add_row(4.0), r2 = lp.add_row(12.0), r3 = lp.add_row(18.0);
  lp.add_coefficient(r1, x, 1.0);
  lp.add_coefficient(r2, y, 2.0);
  lp.add_coefficient(r3, x, 3.0);
  lp.add_coefficient(r3, y, 2.0);
  SimplexOptions opts;
  opts.max_iterations = 1;
  CHECK(RevisedSimplex(opts).solve(lp).status == LpStatus::IterationLimit);
}

TEST_CASE("text dump lists rows and solution") {
  LinearProgram lp;
  const int x = lp.add_variable(2.0);
  const int r = lp.add_row(4.0);
  lp.add_coefficient(r, x, 1.0);
  const auto sol = RevisedSimplex().solve(lp);
  std::ostringstream os;
  write_lp_text(os, lp, {"flow"}, {"cap"}, &sol);
  const auto text = os.str();
  CHECK(text.find("flow") != std::string::npos);
  CHECK(text.find("cap") != std::string::npos);
  CHECK(text.find("4") != std::string::npos);
}

TEST_CASE("bad coefficient indices are rejected") {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_row(1.0);
  CHECK_THROWS(lp.add_coefficient(1, 0, 1.0));
  CHECK_THROWS(lp.add_coefficient(0, 1, 1.0));
  CHECK_THROWS(lp.add_row(-1.0));
}
