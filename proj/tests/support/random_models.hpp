#pragma once

// Hand-rolled generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "kellylab/betting.hpp"
#include "kellylab/functional.hpp"
#include "kellylab/process_model.hpp"

namespace kellylab::testing {

using Rng = std::mt19937_64;

struct ModelShape {
  std::size_t min_n = 1;
  std::size_t max_n = 6;
  std::size_t min_y = 2;
  std::size_t max_y = 3;
  std::size_t min_x = 1;
  std::size_t max_x = 3;
  /// Upper bound on |X|^n |Y|^n; n is lowered until it fits.
  std::uint64_t max_sequences = 20'000;
  /// Probability that a side-information row entry is forced to zero.
  double zero_chance = 0.1;
  /// Same for outcome rows. Zero outcomes break the equalities for any
  /// strategy that still stakes on them.
  double outcome_zero_chance = 0.1;
  /// Lower bound on every row entry when zero_chance is 0.
  double floor = 0.0;
};

double uniform(Rng& rng, double lo, double hi);
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi);

/// Dirichlet(1) row of length k, optionally with zeros; at least one entry
/// stays positive.
std::vector<double> random_row(Rng& rng, std::size_t k, double zero_chance, double floor);

Memory random_memory(Rng& rng);

ProcessModel random_model(Rng& rng, const ModelShape& shape);

/// R and Rbar in [0.5, 3].
GameSpec random_binary_game(Rng& rng);
/// Odds in [0.5, 5] with random history dependence.
GameSpec random_horse_game(Rng& rng, std::size_t M, std::size_t n);

/// Fractions uniform in 0.999 (-1/R, 1/Rbar) with random memory.
Strategy random_binary_strategy(Rng& rng, const GameSpec& game, const ProcessModel& model);
/// Strictly positive rows.
Strategy random_horse_strategy(Rng& rng, const ProcessModel& model);

/// Model shapes inside the premises of each theorem, with positive outcome rows.
ModelShape theorem_shape(Theorem theorem);

struct RandomCase {
  ProcessModel model;
  GameSpec game;
  Strategy strategy;
};

RandomCase random_case(Rng& rng, Theorem theorem);

}  // namespace kellylab::testing
