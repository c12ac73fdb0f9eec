#pragma once

// Brute-force references used by unit and acceptance tests.

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cnc/lp.hpp"
#include "cnc/virtual_controller.hpp"

namespace cnc::oracle {

// Best objective over all vertices of {Ax <= b, x >= 0}, found by solving
// every n x n subsystem of the stacked constraints. Bounded LPs only.
double vertex_enumeration(const LinearProgram& lp, double feas_tol = 1e-9);

// Random bounded LP with `vars` variables and `rows` rows, b >= 0 and a
// box row per variable so the optimum is finite.
LinearProgram random_lp(std::mt19937_64& rng, int vars, int rows);

// Maximizes sum w * nu over "give the full capacity to one candidate or to
// none" by enumerating every choice; ties keep the first choice in
// (commodity, lifetime, stage) order.
std::optional<std::size_t> brute_force_max_weight(std::span<const MaxWeightCandidate> candidates);

std::vector<MaxWeightCandidate> random_candidates(std::mt19937_64& rng, int count);

}  // namespace cnc::oracle
