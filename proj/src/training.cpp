#include "syncount/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "syncount/eval.hpp"
#include "syncount/parallel.hpp"

namespace syncount {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning rate must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be nonnegative");
  if (restarts < 1) throw std::invalid_argument("restarts must be positive");
  if (!(init_scale > 0.0)) throw std::invalid_argument("init scale must be positive");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("convergence tolerance must be nonnegative");
  model.validate();
}

std::string TrainConfig::key() const {
  return model.name() + " lr=" + format_number(learning_rate) + " lambda=" + format_number(lambda);
}

VectorXd initial_parameters(const Model& model, double init_scale, Rng& rng) {
  VectorXd theta = VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
  if (model.spec().has_network()) {
    std::normal_distribution<double> normal(0.0, init_scale);
    const auto& layout = model.layout();
    for (std::size_t i = layout.slot_offset; i < layout.size(); ++i)
      theta(static_cast<Eigen::Index>(i)) = normal(rng);
  }
  return theta;
}

RestartOutcome gradient_ascent(Model& model, const IndexedCounts& counts, const TrainConfig& config, int restart,
                               std::vector<TraceRecord>* trace) {
  RestartOutcome outcome;
  outcome.restart = restart;
  const double scale = config.learning_rate / std::max(counts.total, 1.0);

  double current = objective(model, counts, config.lambda);
  if (!std::isfinite(current)) throw NumericalError("initial objective is not finite");
  if (trace) trace->push_back({restart, 0, current});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    VectorXd step = scale * gradient(model, counts, config.lambda);
    VectorXd next = model.parameters() + step;
    if (!next.allFinite()) throw NumericalError("parameters diverged at epoch " + std::to_string(epoch));
    model.set_parameters(std::move(next));
    const double updated = objective(model, counts, config.lambda);
    if (!std::isfinite(updated)) throw NumericalError("objective diverged at epoch " + std::to_string(epoch));
    if (trace) trace->push_back({restart, epoch, updated});
    outcome.epochs = epoch;
    const bool converged = std::abs(updated - current) <= config.convergence_tol * std::max(std::abs(current), 1.0);
    current = updated;
    if (converged) break;
  }
  outcome.final_objective = current;
  return outcome;
}

TrainResult train(std::shared_ptr<const Lexicon> lexicon, const CountTable& counts, const TrainConfig& config) {
  config.validate();
  const IndexedCounts indexed = index_counts(*lexicon, counts);
  const auto n = static_cast<std::size_t>(config.restarts);

  std::vector<std::optional<Model>> models(n);
  std::vector<RestartOutcome> outcomes(n);
  std::vector<std::vector<TraceRecord>> traces(n);
  parallel_for(n, config.jobs, [&](std::size_t r) {
    const int restart = static_cast<int>(r);
    Model model(lexicon, config.model);
    Rng rng = make_rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    model.set_parameters(initial_parameters(model, config.init_scale, rng));
    try {
      outcomes[r] = gradient_ascent(model, indexed, config, restart, &traces[r]);
      models[r] = std::move(model);
    } catch (const NumericalError& e) {
      outcomes[r].restart = restart;
      outcomes[r].diverged = true;
      outcomes[r].error = e.what();
      outcomes[r].epochs = traces[r].empty() ? 0 : traces[r].back().epoch;
      outcomes[r].final_objective = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < n; ++r) {
    if (outcomes[r].diverged) continue;
    if (!best || outcomes[r].final_objective > outcomes[*best].final_objective) best = r;
  }
  if (!best) throw NumericalError("all " + std::to_string(n) + " restarts diverged (" + outcomes[0].error + ")");

  TrainResult result{std::move(*models[*best]), static_cast<int>(*best), outcomes[*best].final_objective,
                     std::move(outcomes), {}};
  for (auto& t : traces) result.trace.insert(result.trace.end(), t.begin(), t.end());
  return result;
}

// ---------------------------------------------------------------------------

Model em_step(const Model& model, const CountTable& counts, double lambda, const EmOptions& options) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  const IndexedCounts indexed = index_counts(model.lexicon(), counts);
  const ExpectedCounts fractional = expected_counts(model, indexed);
  const double scale = 1.0 / std::max(indexed.total, 1.0);

  Model current = model;
  double q = complete_data_objective(current, fractional, lambda);
  VectorXd g = complete_data_gradient(current, fractional, lambda);
  double step = options.initial_step;
  for (int it = 0; it < options.max_inner_steps; ++it) {
    const double g_norm = g.lpNorm<Eigen::Infinity>();
    if (g_norm * scale <= options.inner_tol) break;
    // Below this, differences in Q are rounding noise and the gradient decides.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(q), 1.0);
    bool accepted = false;
    while (step > 1e-14) {
      VectorXd next = current.parameters() + (step * scale) * g;
      if (next.allFinite()) {
        Model candidate = current;
        candidate.set_parameters(std::move(next));
        const double q_next = complete_data_objective(candidate, fractional, lambda);
        if (std::isfinite(q_next) && q_next >= q - noise) {
          VectorXd g_next = complete_data_gradient(candidate, fractional, lambda);
          if (q_next > q + noise || g_next.lpNorm<Eigen::Infinity>() < g_norm) {
            current = std::move(candidate);
            q = std::max(q, q_next);
            g = std::move(g_next);
            step *= 1.5;
            accepted = true;
            break;
          }
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return current;
}

EmResult run_em(Model model, const CountTable& counts, double lambda, int max_iterations, double tol,
                const EmOptions& options) {
  EmResult result{std::move(model), {}};
  double current = objective(result.model, counts, lambda);
  result.objectives.push_back(current);
  for (int i = 0; i < max_iterations; ++i) {
    Model next_model = em_step(result.model, counts, lambda, options);
    const double step = (next_model.parameters() - result.model.parameters()).lpNorm<Eigen::Infinity>();
    result.model = std::move(next_model);
    const double next = objective(result.model, counts, lambda);
    result.objectives.push_back(next);
    const bool converged = std::abs(next - current) <= tol * std::max(std::abs(current), 1.0) &&
                           (options.parameter_tol <= 0.0 || step <= options.parameter_tol);
    current = next;
    if (converged) break;
  }
  return result;
}

// ---------------------------------------------------------------------------

TokenSplit split_tokens(const CountTable& counts, std::array<double, 3> fractions, std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");

  TokenSplit split;
  for (const auto& [form, c] : counts) {
    if (std::floor(c) != c) throw std::invalid_argument("count of '" + form + "' is not an integer");
    const auto total = static_cast<std::uint64_t>(c);
    Rng rng = make_rng(derive_seed(seed, form));
    // Multinomial as a chain of binomials.
    std::binomial_distribution<std::uint64_t> first(total, fractions[0]);
    const std::uint64_t n_train = total > 0 ? first(rng) : 0;
    const std::uint64_t rest = total - n_train;
    std::binomial_distribution<std::uint64_t> second(rest, fractions[1] / (fractions[1] + fractions[2]));
    const std::uint64_t n_dev = rest > 0 ? second(rng) : 0;
    const std::uint64_t n_test = rest - n_dev;
    split.train.add(form, static_cast<double>(n_train));
    split.dev.add(form, static_cast<double>(n_dev));
    split.test.add(form, static_cast<double>(n_test));
  }
  return split;
}

// ---------------------------------------------------------------------------

std::vector<TrainConfig> GridSpec::points() const {
  std::vector<TrainConfig> out;
  for (const auto& m : models) {
    for (double lr : learning_rates) {
      for (double lambda : lambdas) {
        TrainConfig c = base;
        c.model = m;
        c.learning_rate = lr;
        c.lambda = lambda;
        c.seed = derive_seed(base.seed, c.key());
        c.jobs = 1;
        out.push_back(c);
      }
    }
  }
  return out;
}

GridResult grid_search(std::shared_ptr<const Lexicon> lexicon, const CountTable& train_counts,
                       const CountTable& dev_counts, const GridSpec& grid) {
  if (grid.learning_rates.empty() || grid.lambdas.empty() || grid.models.empty())
    throw std::invalid_argument("grid has an empty axis");
  const auto configs = grid.points();
  const auto n = configs.size();

  std::vector<GridPoint> points(n);
  std::vector<std::optional<TrainResult>> results(n);
  parallel_for(n, grid.base.jobs, [&](std::size_t i) {
    points[i].config = configs[i];
    try {
      TrainResult r = train(lexicon, train_counts, configs[i]);
      points[i].train_objective = r.objective;
      points[i].dev_perplexity = perplexity(r.model, dev_counts).perplexity;
      if (!std::isfinite(points[i].dev_perplexity)) throw NumericalError("non-finite dev perplexity");
      results[i] = std::move(r);
    } catch (const std::exception& e) {
      points[i].failed = true;
      points[i].error = e.what();
    }
  });

  auto rank = [&](std::size_t i) {
    const auto& c = points[i].config;
    return std::make_tuple(points[i].dev_perplexity, c.lambda, c.model.depth(), c.key());
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i].failed) continue;
    if (!best || rank(i) < rank(*best)) best = i;
  }
  if (!best) throw NumericalError("every grid point failed (" + points[0].error + ")");

  TrainResult training = std::move(*results[*best]);
  Model model = training.model;
  return GridResult{points[*best].config, std::move(model), points[*best].dev_perplexity, std::move(training),
                    std::move(points)};
}

}  // namespace syncount
