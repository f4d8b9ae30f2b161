// syncount: partition unigram counts of surface forms among their analyses in
// an inflected lexicon.
//
//   syncount synth         generate a lexicon, a corpus and its hidden annotation
//   syncount split         80/10/10 token split of a count table
//   syncount train         fit a model (grid search when given several settings)
//   syncount eval          perplexity and supervised KL of a checkpoint
//   syncount disambiguate  fractional counts per ⟨lemma, form, features⟩
//   syncount sample        distinct word types in discovery order

#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syncount/checkpoint.hpp"
#include "syncount/counts.hpp"
#include "syncount/disambiguate.hpp"
#include "syncount/eval.hpp"
#include "syncount/lexicon.hpp"
#include "syncount/model.hpp"
#include "syncount/synth.hpp"
#include "syncount/training.hpp"

namespace {

using namespace syncount;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kParse = 3,
  kNumerical = 4,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string with_file(const std::string& path, const std::string& what) { return path + ": " + what; }

std::shared_ptr<const Lexicon> load_lexicon(const std::string& path, bool uniform_overabundance) {
  const auto text = read_text_file(path);
  try {
    ParseOptions options;
    options.overabundance = uniform_overabundance ? Overabundance::kUniform : Overabundance::kReject;
    return std::make_shared<const Lexicon>(parse_unimorph(text, options));
  } catch (const ParseError& e) {
    throw ParseError(with_file(path, e.what()), 0);
  } catch (const LexiconError& e) {
    throw ParseError(with_file(path, e.what()), 0);
  }
}

CountTable load_counts(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return parse_counts(text);
  } catch (const ParseError& e) {
    throw ParseError(with_file(path, e.what()), 0);
  }
}

ReferenceCounts load_reference(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return parse_reference(text);
  } catch (const ParseError& e) {
    throw ParseError(with_file(path, e.what()), 0);
  }
}

Model load_model(const std::string& path, std::shared_ptr<const Lexicon> lexicon) {
  const auto text = read_text_file(path);
  try {
    return read_checkpoint(text, std::move(lexicon));
  } catch (const ParseError& e) {
    throw ParseError(with_file(path, e.what()), 0);
  } catch (const std::invalid_argument& e) {
    throw ParseError(with_file(path, e.what()), 0);
  }
}

CountTable in_lexicon(const Lexicon& lexicon, const CountTable& counts, const std::string& label) {
  auto filtered = filter_counts(lexicon, counts);
  if (filtered.dropped_types > 0) {
    std::cerr << label << ": dropped " << filtered.dropped_types << " form types (" << format_number(filtered.dropped_tokens)
              << " tokens) not in the lexicon\n";
  }
  return std::move(filtered.kept);
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    write_text_file(path, contents);
  }
}

// ---------------------------------------------------------------------------

struct LexiconArgs {
  std::string lexicon;
  bool uniform_overabundance = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--lexicon", lexicon, "UniMorph TSV lexicon")->required()->envname("SYNCOUNT_LEXICON");
    cmd->add_flag("--uniform-overabundance", uniform_overabundance,
                  "split δ uniformly over several forms of one cell instead of rejecting the lexicon");
  }
};

struct TrainArgs {
  LexiconArgs lex;
  std::string counts;
  std::string dev;
  std::vector<std::string> kinds{"neural"};
  std::vector<int> layers{1};
  int hidden = 100;
  bool biases = false;
  std::vector<double> lambdas{1e-3};
  std::vector<double> learning_rates{1.0};
  int epochs = 500;
  int restarts = 3;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  double tol = 1e-7;
  int jobs = 1;
  std::string out;
  std::string trace;
};

std::string format_trace(const std::vector<TraceRecord>& trace) {
  std::string out = "restart\tepoch\tobjective\n";
  for (const auto& r : trace)
    out += std::to_string(r.restart) + "\t" + std::to_string(r.epoch) + "\t" + format_number(r.objective) + "\n";
  return out;
}

int run_train(const TrainArgs& a) {
  auto lexicon = load_lexicon(a.lex.lexicon, a.lex.uniform_overabundance);
  const CountTable counts = in_lexicon(*lexicon, load_counts(a.counts), a.counts);

  GridSpec grid;
  grid.learning_rates = a.learning_rates;
  grid.lambdas = a.lambdas;
  grid.models.clear();
  for (const auto& name : a.kinds) {
    auto kind = parse_slot_model_kind(name);
    if (!kind) throw UsageError("unknown --kind '" + name + "'");
    if (*kind == SlotModelKind::kNeural) {
      for (int k : a.layers) grid.models.push_back(SlotModelSpec::neural(k, a.hidden, a.biases));
    } else {
      grid.models.push_back({*kind, 0, 0, false});
    }
  }
  grid.base.epochs = a.epochs;
  grid.base.restarts = a.restarts;
  grid.base.seed = a.seed;
  grid.base.init_scale = a.init_scale;
  grid.base.convergence_tol = a.tol;
  grid.base.jobs = a.jobs;
  for (const auto& p : grid.points()) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  const bool search = grid.points().size() > 1 || !a.dev.empty();
  std::optional<TrainResult> result;
  TrainConfig chosen;
  if (search) {
    if (a.dev.empty()) throw UsageError("several hyperparameter settings need --dev counts to choose among them");
    const CountTable dev = load_counts(a.dev);
    GridResult g = grid_search(lexicon, counts, dev, grid);
    for (const auto& p : g.points) {
      std::cout << "grid\t" << p.config.key() << "\t"
                << (p.failed ? "failed: " + p.error : "dev_perplexity=" + format_number(p.dev_perplexity)) << "\n";
    }
    std::cout << "selected\t" << g.best.key() << "\tdev_perplexity=" << format_number(g.dev_perplexity) << "\n";
    chosen = g.best;
    result = std::move(g.training);
  } else {
    chosen = grid.points().front();
    chosen.seed = a.seed;
    chosen.jobs = a.jobs;
    result = train(lexicon, counts, chosen);
  }

  const auto& best = result->restarts[static_cast<std::size_t>(result->best_restart)];
  std::cout << "model\t" << chosen.key() << "\n"
            << "final_objective\t" << format_number(result->objective) << "\n"
            << "restart\t" << result->best_restart << "\n"
            << "epochs\t" << best.epochs << "\n";
  for (const auto& r : result->restarts)
    if (r.diverged) std::cerr << "restart " << r.restart << " diverged: " << r.error << "\n";

  emit(a.out, write_checkpoint(result->model));
  if (!a.trace.empty()) emit(a.trace, format_trace(result->trace));
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  LexiconArgs lex;
  std::string checkpoint;
  std::string counts;
  std::string reference;
  std::string language = "xx";
  std::string out;
};

int run_eval(const EvalArgs& a) {
  if (a.counts.empty() && a.reference.empty()) throw UsageError("eval needs --counts and/or --reference");
  auto lexicon = load_lexicon(a.lex.lexicon, a.lex.uniform_overabundance);
  const Model model = load_model(a.checkpoint, lexicon);
  const std::string name = model.spec().name();

  std::ostringstream text;
  std::string records = "record\tpanel\tlanguage\tmodel\tvalue\n";
  auto record = [&](const std::string& kind, const std::string& panel, double value) {
    records += kind + "\t" + panel + "\t" + a.language + "\t" + name + "\t" + format_number(value) + "\n";
  };

  if (!a.counts.empty()) {
    const auto report = perplexity(model, load_counts(a.counts));
    text << "perplexity            " << format_number(report.perplexity) << "\n"
         << "  scored tokens       " << format_number(report.token_count) << "\n"
         << "  OOV tokens dropped  " << format_number(report.oov_tokens_dropped) << " (" << report.oov_types_dropped
         << " types)\n";
    record("figure", "perplexity", report.perplexity);
    record("metric", "perplexity_tokens", report.token_count);
    record("metric", "perplexity_oov_tokens", report.oov_tokens_dropped);
  }
  if (!a.reference.empty()) {
    const ReferenceCounts filtered = filter_reference(*lexicon, load_reference(a.reference));
    const auto report = kl_eval(model, filtered);
    const double gap = std::abs(report.weighted_kl_bits - report.token_average_bits);
    text << "KL (bits)             " << format_number(report.weighted_kl_bits) << "\n"
         << "  token average       " << format_number(report.token_average_bits) << "\n"
         << "  identity gap        " << format_number(gap) << "\n"
         << "  reference tokens    " << format_number(report.token_count) << "\n"
         << "  dropped tokens      " << format_number(report.dropped_tokens) << "\n";
    record("figure", "kl", report.weighted_kl_bits);
    record("metric", "kl_token_average", report.token_average_bits);
    record("metric", "kl_identity_gap", gap);
    record("metric", "kl_tokens", report.token_count);
    record("metric", "kl_dropped_tokens", report.dropped_tokens);
    if (!(gap < 1e-9)) throw NumericalError("KL self-test failed: the two computations differ by " + format_number(gap));
  }
  std::cout << text.str();
  if (a.out.empty()) {
    std::cout << "\n" << records;
  } else {
    write_text_file(a.out, records);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct DisambiguateArgs {
  LexiconArgs lex;
  std::string checkpoint;
  std::string counts;
  std::string out;
};

int run_disambiguate(const DisambiguateArgs& a) {
  auto lexicon = load_lexicon(a.lex.lexicon, a.lex.uniform_overabundance);
  const Model model = load_model(a.checkpoint, lexicon);
  const CountTable counts = in_lexicon(*lexicon, load_counts(a.counts), a.counts);
  const FractionalCounts fractional = fractional_counts(model, counts);
  emit(a.out, write_reference(fractional.to_reference(), "fractional_count"));
  return kOk;
}

// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string counts;
  std::vector<double> fractions{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
  std::string out;
};

int run_split(const SplitArgs& a) {
  if (a.fractions.size() != 3) throw UsageError("--fractions takes three values");
  const CountTable counts = load_counts(a.counts);
  if (!counts.integral()) throw ParseError(a.counts + ": split needs integer counts", 0);
  TokenSplit parts;
  try {
    parts = split_tokens(counts, {a.fractions[0], a.fractions[1], a.fractions[2]}, a.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_text_file(a.out + ".train.tsv", write_counts(parts.train));
  write_text_file(a.out + ".dev.tsv", write_counts(parts.dev));
  write_text_file(a.out + ".test.tsv", write_counts(parts.test));
  std::cout << "tokens\t" << format_number(counts.total()) << "\n"
            << "train\t" << format_number(parts.train.total()) << "\n"
            << "dev\t" << format_number(parts.dev.total()) << "\n"
            << "test\t" << format_number(parts.test.total()) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  LexiconArgs lex;
  std::string checkpoint;
  std::size_t n = 1;
  std::size_t train_size = 0;
  std::string mode = "tuples";
  std::uint64_t seed = 0;
  std::uint64_t max_draws = 50'000'000;
  std::string out;
};

int run_sample(const SampleArgs& a) {
  auto mode = parse_sample_mode(a.mode);
  if (!mode) throw UsageError("unknown --mode '" + a.mode + "'");
  auto lexicon = load_lexicon(a.lex.lexicon, a.lex.uniform_overabundance);
  const Model model = load_model(a.checkpoint, lexicon);
  const std::size_t support = support_size(model, *mode);
  if (a.n > support)
    throw UsageError("-n " + std::to_string(a.n) + " exceeds the " + std::to_string(support) + " distinct " +
                     to_string(*mode) + " in the lexicon");
  const std::size_t train_size = a.train_size == 0 ? a.n : std::min(a.train_size, a.n);

  SampleOptions options;
  options.mode = *mode;
  options.max_draws = a.max_draws;
  const auto items = sample_types(model, a.n, a.seed, options);

  std::string out = *mode == SampleMode::kTuples ? "rank\tsplit\tlemma\tform\tfeatures\n" : "rank\tsplit\tform\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += std::to_string(i + 1) + "\t" + (i < train_size ? "train" : "test") + "\t";
    const auto& form = lexicon->forms()[items[i].form];
    if (items[i].analysis) {
      const auto key = lexicon->key(*items[i].analysis);
      out += key.lexeme.lemma + "\t" + form + "\t" + format_bundle(key.tag, key.slot) + "\n";
    } else {
      out += form + "\n";
    }
  }
  emit(a.out, out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::string pos = "N";
  std::vector<std::string> grid{"case=NOM,GEN,ACC", "num=SG,PL"};
  std::size_t lexemes = 50;
  double rate = 0.4;
  std::uint64_t tokens = 100000;
  double slot_skew = 1.5;
  double lexeme_skew = 1.0;
  bool collision_free = false;
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
  SynthSpec spec;
  SynthTagSpec tag;
  tag.pos = a.pos;
  tag.lexemes = a.lexemes;
  for (const auto& g : a.grid) {
    auto eq = g.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == g.size())
      throw UsageError("--grid expects attribute=VALUE,VALUE,...");
    std::vector<std::string> values;
    for (auto v : split(std::string_view(g).substr(eq + 1), ','))
      if (!v.empty()) values.emplace_back(v);
    tag.grid.emplace_back(g.substr(0, eq), std::move(values));
  }
  spec.tags.push_back(std::move(tag));
  spec.syncretism_rate = a.rate;
  spec.alphabet = a.alphabet;
  spec.collision_free = a.collision_free;
  spec.seed = derive_seed(a.seed, "lexicon");

  SynthLexicon synth;
  try {
    synth = generate_lexicon(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const LexiconError& e) {
    throw UsageError(e.what());
  }
  auto lexicon = std::make_shared<const Lexicon>(std::move(synth.lexicon));
  const Model truth = ground_truth_model(lexicon, a.slot_skew, a.lexeme_skew, derive_seed(a.seed, "truth"));
  const SynthCorpus corpus = sample_corpus(truth, a.tokens, derive_seed(a.seed, "corpus"));

  write_text_file(a.out + ".lexicon.tsv", write_unimorph(*lexicon));
  write_text_file(a.out + ".counts.tsv", write_counts(corpus.counts));
  write_text_file(a.out + ".reference.tsv", write_reference(corpus.reference));
  write_text_file(a.out + ".truth.ckpt", write_checkpoint(truth));
  std::cout << "entries\t" << lexicon->entries().size() << "\n"
            << "forms\t" << lexicon->num_forms() << "\n"
            << "syncretic_cells\t" << synth.syncretism.size() << "\n"
            << "tokens\t" << format_number(corpus.counts.total()) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition unigram counts of surface forms among their analyses in an inflected lexicon."};
  app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  auto add_seed = [](CLI::App* cmd, std::uint64_t& target) {
    cmd->add_option("--seed", target, "random seed")->envname("SYNCOUNT_SEED");
  };

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "fit a model on raw counts");
  train_args.lex.add(train_cmd);
  train_cmd->add_option("--counts", train_args.counts, "training counts (form TAB count)")->required();
  train_cmd->add_option("--dev", train_args.dev, "development counts for hyperparameter selection");
  train_cmd->add_option("--kind", train_args.kinds, "slot model(s): unif, free, linear, neural")
      ->delimiter(',')
      ->envname("SYNCOUNT_KIND");
  train_cmd->add_option("--layers", train_args.layers, "hidden layer count(s) for neural")->delimiter(',');
  train_cmd->add_option("--hidden", train_args.hidden, "hidden units per layer")->check(CLI::PositiveNumber);
  train_cmd->add_flag("--biases", train_args.biases, "per-layer bias terms in the neural slot model");
  train_cmd->add_option("--lambda", train_args.lambdas, "L2 coefficient(s)")
      ->delimiter(',')
      ->envname("SYNCOUNT_LAMBDA");
  train_cmd->add_option("--lr", train_args.learning_rates, "learning rate(s)")->delimiter(',')->envname("SYNCOUNT_LR");
  train_cmd->add_option("--epochs", train_args.epochs, "maximum epochs per restart")->envname("SYNCOUNT_EPOCHS");
  train_cmd->add_option("--restarts", train_args.restarts, "random restarts")->envname("SYNCOUNT_RESTARTS");
  add_seed(train_cmd, train_args.seed);
  train_cmd->add_option("--init-scale", train_args.init_scale, "std. dev. of initial network weights");
  train_cmd->add_option("--tol", train_args.tol, "relative objective change that ends a restart");
  train_cmd->add_option("--jobs", train_args.jobs, "threads for restarts and grid points")->envname("SYNCOUNT_JOBS");
  train_cmd->add_option("--out", train_args.out, "checkpoint path")->required();
  train_cmd->add_option("--trace", train_args.trace, "per-epoch objective trace (TSV)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "perplexity and supervised KL of a checkpoint");
  eval_args.lex.add(eval_cmd);
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "model checkpoint")->required();
  eval_cmd->add_option("--counts", eval_args.counts, "held-out counts for perplexity");
  eval_cmd->add_option("--reference", eval_args.reference, "supervised reference counts for KL");
  eval_cmd->add_option("--language", eval_args.language, "label for the chart records");
  eval_cmd->add_option("--out", eval_args.out, "machine-readable records (TSV)");

  DisambiguateArgs dis_args;
  auto* dis_cmd = app.add_subcommand("disambiguate", "fractional counts of lexicon tuples");
  dis_args.lex.add(dis_cmd);
  dis_cmd->add_option("--checkpoint", dis_args.checkpoint, "model checkpoint")->required();
  dis_cmd->add_option("--counts", dis_args.counts, "raw counts")->required();
  dis_cmd->add_option("--out", dis_args.out, "output TSV (default stdout)");

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "random token split into train/dev/test");
  split_cmd->add_option("--counts", split_args.counts, "integer counts")->required();
  split_cmd->add_option("--fractions", split_args.fractions, "train,dev,test fractions")->delimiter(',');
  add_seed(split_cmd, split_args.seed);
  split_cmd->add_option("--out", split_args.out, "output prefix (.train.tsv, .dev.tsv, .test.tsv)")->required();

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "distinct word types without replacement");
  sample_args.lex.add(sample_cmd);
  sample_cmd->add_option("--checkpoint", sample_args.checkpoint, "model checkpoint")->required();
  sample_cmd->add_option("-n", sample_args.n, "number of distinct types")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--train-size", sample_args.train_size, "types marked 'train' (default: all)");
  sample_cmd->add_option("--mode", sample_args.mode, "tuples or forms")->envname("SYNCOUNT_MODE");
  add_seed(sample_cmd, sample_args.seed);
  sample_cmd->add_option("--max-draws", sample_args.max_draws, "draw budget");
  sample_cmd->add_option("--out", sample_args.out, "output TSV (default stdout)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "synthetic lexicon, corpus and hidden annotation");
  synth_cmd->add_option("--out", synth_args.out, "output prefix")->required();
  synth_cmd->add_option("--pos", synth_args.pos, "part of speech of the generated paradigms");
  synth_cmd->add_option("--grid", synth_args.grid, "slot grid axis attribute=V1,V2,... (repeatable)");
  synth_cmd->add_option("--lexemes", synth_args.lexemes, "number of lexemes");
  synth_cmd->add_option("--rate", synth_args.rate, "syncretism rate");
  synth_cmd->add_option("--tokens", synth_args.tokens, "corpus size")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--slot-skew", synth_args.slot_skew, "std. dev. of true slot logits");
  synth_cmd->add_option("--lexeme-skew", synth_args.lexeme_skew, "std. dev. of true lexeme logits");
  synth_cmd->add_flag("--collision-free", synth_args.collision_free, "never reuse a random form");
  synth_cmd->add_option("--alphabet", synth_args.alphabet, "characters of random forms");
  add_seed(synth_cmd, synth_args.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return run_train(train_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*dis_cmd) return run_disambiguate(dis_args);
    if (*split_cmd) return run_split(split_args);
    if (*sample_cmd) return run_sample(sample_args);
    if (*synth_cmd) return run_synth(synth_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const LexiconError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
