#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "syncount/counts.hpp"
#include "syncount/model.hpp"
#include "syncount/rng.hpp"

namespace syncount {

struct TrainConfig {
  double learning_rate = 1.0;
  int epochs = 500;
  double lambda = 1e-3;
  int restarts = 3;
  SlotModelSpec model = SlotModelSpec::neural(1);
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  // Stop once |ΔJ| <= tol · max(|J|, 1).
  double convergence_tol = 1e-7;
  // Threads for independent restarts / grid points.
  int jobs = 1;

  // Throws std::invalid_argument.
  void validate() const;
  // Identifies the hyperparameters: "neural-k1-d100 lr=1 lambda=0.001".
  std::string key() const;
};

struct TraceRecord {
  int restart = 0;
  int epoch = 0;
  double objective = 0.0;
};

struct RestartOutcome {
  int restart = 0;
  bool diverged = false;
  int epochs = 0;
  double final_objective = 0.0;
  std::string error;
};

struct TrainResult {
  Model model;
  int best_restart = 0;
  double objective = 0.0;
  std::vector<RestartOutcome> restarts;
  std::vector<TraceRecord> trace;
};

// Random initial θ: network weights ~ N(0, init_scale²), every ω at 0.
VectorXd initial_parameters(const Model& model, double init_scale, Rng& rng);

// One restart of full-batch gradient ascent from the model's current θ.
// Steps are learning_rate · ∇J / max(N, 1) with N the token total.
// Throws NumericalError if the objective becomes non-finite.
RestartOutcome gradient_ascent(Model& model, const IndexedCounts& counts, const TrainConfig& config,
                               int restart, std::vector<TraceRecord>* trace);

// Fits θ on counts already filtered to the lexicon. Keeps the restart with the
// best final objective; throws NumericalError when every restart diverged.
TrainResult train(std::shared_ptr<const Lexicon> lexicon, const CountTable& counts, const TrainConfig& config);

struct EmOptions {
  int max_inner_steps = 500;
  // Inner loop stops when ‖∇Q‖∞ <= tol · max(N, 1).
  double inner_tol = 1e-12;
  double initial_step = 1.0;
  // When positive, run_em also waits for ‖Δθ‖∞ <= parameter_tol. Near the
  // fixed point the objective stops changing in floating point well before θ does.
  double parameter_tol = 0.0;
};

// One EM iteration: partition counts by the posterior, then climb the
// supervised objective of those fractional counts with backtracking gradient steps.
Model em_step(const Model& model, const CountTable& counts, double lambda, const EmOptions& options = {});

struct EmResult {
  Model model;
  std::vector<double> objectives;  // objective before the first and after every iteration
};

// Iterates em_step until the relative objective change drops below `tol`.
EmResult run_em(Model model, const CountTable& counts, double lambda, int max_iterations, double tol,
                const EmOptions& options = {});

struct TokenSplit {
  CountTable train;
  CountTable dev;
  CountTable test;
};

// Assigns each token of every form independently to train/dev/test with the
// given probabilities. Each form draws from its own seeded stream.
TokenSplit split_tokens(const CountTable& counts, std::array<double, 3> fractions, std::uint64_t seed);

struct GridSpec {
  std::vector<double> learning_rates{1.0, 0.1, 0.01};
  std::vector<double> lambdas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<SlotModelSpec> models{SlotModelSpec::neural(1), SlotModelSpec::neural(2), SlotModelSpec::neural(3),
                                    SlotModelSpec::neural(4)};
  // epochs, restarts, seed, init_scale, tolerance and jobs come from here.
  TrainConfig base;

  std::vector<TrainConfig> points() const;
};

struct GridPoint {
  TrainConfig config;
  bool failed = false;
  std::string error;
  double train_objective = 0.0;
  double dev_perplexity = 0.0;
};

struct GridResult {
  TrainConfig best;
  Model model;
  double dev_perplexity = 0.0;
  TrainResult training;
  std::vector<GridPoint> points;
};

// Trains every grid point and keeps the lowest dev perplexity; ties go to the
// smaller λ, then fewer layers, then the smaller key(). Each point's seed is
// derived from base.seed and its key.
GridResult grid_search(std::shared_ptr<const Lexicon> lexicon, const CountTable& train_counts,
                       const CountTable& dev_counts, const GridSpec& grid);

}  // namespace syncount
