// Command-line front end: train, eval, predict, stats, synth, gradcheck.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "farmsift/corpus.hpp"
#include "farmsift/dataset.hpp"
#include "farmsift/embedding.hpp"
#include "farmsift/lexicon.hpp"
#include "farmsift/model.hpp"
#include "farmsift/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string corpus;
  std::string lexicon;
  std::string embeddings;
  std::string checkpoint;
  std::string pos_override;
  std::string out;
  std::string features = "emb-pos-sent";
  std::string activation = "sigmoid";
  std::string optimizer = "adam";
  std::string split = "test";
  std::vector<std::string> credible_domains;
  std::uint64_t seed = 0;
  double lr = 1e-3;
  int batch = 64;
  int epochs = 30;
  int patience = 3;
  // synth
  int n_per_class = 5000;
  int dim = 400;
  farmsift::StyleKnobs knobs;
  // gradcheck
  int gc_configs = 100;
  int gc_rows = 8;
  int gc_fdim = 5;
  double gc_step = 1e-5;
  double gc_tolerance = 1e-3;
};

farmsift::FeatureSet parse_features(const std::string& s) {
  const auto fs = farmsift::feature_set_from_string(s);
  if (!fs) {
    throw std::runtime_error(
        "unknown feature set \"" + s + "\" (emb, emb-pos, emb-pos-sent)");
  }
  return *fs;
}

farmsift::OutActivation parse_activation(const std::string& s) {
  const auto act = farmsift::out_activation_from_string(s);
  if (!act) {
    throw std::runtime_error(
        "unknown activation \"" + s + "\" (sigmoid, tanh, relu)");
  }
  return *act;
}

std::optional<farmsift::Lexicon> maybe_load_lexicon(const Options& o,
                                                    farmsift::FeatureSet fs) {
  if (o.lexicon.empty()) {
    if (has_sentiment(fs)) {
      throw std::runtime_error(
          "feature set emb-pos-sent needs --lexicon for sentiment scores");
    }
    return std::nullopt;
  }
  return farmsift::load_lexicon(o.lexicon);
}

std::optional<farmsift::TagOverrides> maybe_load_overrides(const Options& o) {
  if (o.pos_override.empty()) return std::nullopt;
  return farmsift::load_tag_overrides(o.pos_override);
}

// The deterministic corpus pipeline shared by train and eval. Both must see
// the same seed to agree on the split.
farmsift::CorpusSplit load_split(const Options& o) {
  auto records = farmsift::load_corpus(o.corpus);
  for (auto& r : records) r = farmsift::clean(std::move(r));
  records = farmsift::drop_cross_source(std::move(records),
                                        o.credible_domains);
  records =
      farmsift::balance(std::move(records),
                        farmsift::rng::derive_seed(o.seed, "balance"));
  return farmsift::split_corpus(std::move(records),
                                farmsift::rng::derive_seed(o.seed, "split"));
}

int cmd_train(const Options& o) {
  const auto feature_set = parse_features(o.features);
  const auto lex = maybe_load_lexicon(o, feature_set);
  const auto overrides = maybe_load_overrides(o);
  const auto table = farmsift::load_embeddings(o.embeddings);
  const auto split = load_split(o);

  const auto dataset = [&](const std::vector<farmsift::Record>& records) {
    return farmsift::HeadlineDataset(
        farmsift::prepare_headlines(records, lex ? &*lex : nullptr,
                                    overrides ? &*overrides : nullptr),
        table, feature_set);
  };
  const auto train_ds = dataset(split.train);
  const auto valid_ds = dataset(split.validation);
  const auto test_ds = dataset(split.test);

  farmsift::TrainConfig config;
  config.out_activation = parse_activation(o.activation);
  config.optimizer = o.optimizer == "sgd" ? farmsift::Optimizer::kSgd
                                          : farmsift::Optimizer::kAdam;
  config.learning_rate = o.lr;
  config.batch_size = o.batch;
  config.max_epochs = o.epochs;
  config.patience = o.patience;
  config.seed = o.seed;

  const auto result = farmsift::fit(train_ds, valid_ds, config);
  const auto test = farmsift::evaluate(result.params, test_ds);

  const fs::path out_dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(out_dir);
  farmsift::save_checkpoint(result.params, out_dir / "checkpoint.txt");

  json history = json::array();
  for (const auto& e : result.history) {
    history.push_back({{"train_loss", e.train_loss},
                       {"train_accuracy", e.train_accuracy},
                       {"valid_loss", e.valid_loss},
                       {"valid_accuracy", e.valid_accuracy}});
  }
  const json metrics = {
      {"features", o.features},
      {"activation", o.activation},
      {"optimizer", o.optimizer},
      {"seed", o.seed},
      {"learning_rate", o.lr},
      {"batch_size", o.batch},
      {"max_epochs", o.epochs},
      {"patience", o.patience},
      {"counts",
       {{"train", split.train.size()},
        {"validation", split.validation.size()},
        {"test", split.test.size()}}},
      {"best_epoch", result.best_epoch},
      {"history", history},
      {"test", {{"accuracy", test.accuracy}, {"loss", test.mean_loss}}},
  };
  std::ofstream mf(out_dir / "metrics.json");
  mf << metrics.dump(2) << '\n';

  std::printf("%s | %s | test accuracy %.4f | test loss %.4f\n",
              o.features.c_str(), o.activation.c_str(), test.accuracy,
              test.mean_loss);
  return 0;
}

// Feature set implied by checkpoint width and embedding dimension.
farmsift::FeatureSet resolve_features(const Options& o,
                                      const farmsift::ModelParams& params,
                                      int dim, bool features_given) {
  std::optional<farmsift::FeatureSet> inferred;
  for (const auto fs : {farmsift::FeatureSet::kEmb,
                        farmsift::FeatureSet::kEmbPos,
                        farmsift::FeatureSet::kEmbPosSent}) {
    if (farmsift::feature_width(fs, dim) == params.feature_dim) inferred = fs;
  }
  if (!inferred) {
    throw std::runtime_error(
        "checkpoint expects " + std::to_string(params.feature_dim) +
        " feature columns; no feature set over " + std::to_string(dim) +
        "-dimensional embeddings matches");
  }
  if (features_given && parse_features(o.features) != *inferred) {
    throw std::runtime_error("feature set \"" + o.features +
                             "\" does not match the checkpoint width " +
                             std::to_string(params.feature_dim));
  }
  return *inferred;
}

int cmd_eval(const Options& o, bool features_given, bool activation_given) {
  const auto params = farmsift::load_checkpoint(o.checkpoint);
  if (activation_given &&
      parse_activation(o.activation) != params.out_activation) {
    throw std::runtime_error(
        "activation \"" + o.activation + "\" does not match checkpoint (" +
        std::string(farmsift::to_string(params.out_activation)) + ")");
  }
  const auto table = farmsift::load_embeddings(o.embeddings);
  const auto feature_set =
      resolve_features(o, params, table.dim, features_given);
  const auto lex = maybe_load_lexicon(o, feature_set);
  const auto overrides = maybe_load_overrides(o);

  auto split = load_split(o);
  std::vector<farmsift::Record> records;
  if (o.split == "train") {
    records = std::move(split.train);
  } else if (o.split == "validation") {
    records = std::move(split.validation);
  } else if (o.split == "test") {
    records = std::move(split.test);
  } else if (o.split == "all") {
    records = std::move(split.train);
    records.insert(records.end(),
                   std::make_move_iterator(split.validation.begin()),
                   std::make_move_iterator(split.validation.end()));
    records.insert(records.end(),
                   std::make_move_iterator(split.test.begin()),
                   std::make_move_iterator(split.test.end()));
  } else {
    throw std::runtime_error("unknown split \"" + o.split +
                             "\" (train, validation, test, all)");
  }

  const farmsift::HeadlineDataset ds(
      farmsift::prepare_headlines(records, lex ? &*lex : nullptr,
                                  overrides ? &*overrides : nullptr),
      table, feature_set);
  const auto metrics = farmsift::evaluate(params, ds);
  std::printf("accuracy %.4f | loss %.4f\n", metrics.accuracy,
              metrics.mean_loss);
  return 0;
}

int cmd_predict(const Options& o, const std::string& input,
                bool features_given) {
  const auto params = farmsift::load_checkpoint(o.checkpoint);
  const auto table = farmsift::load_embeddings(o.embeddings);
  const auto feature_set =
      resolve_features(o, params, table.dim, features_given);
  const auto lex = maybe_load_lexicon(o, feature_set);
  const auto overrides = maybe_load_overrides(o);

  const auto records =
      farmsift::load_corpus(input, farmsift::LoadMode::kPredict);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw std::runtime_error("cannot write " + o.out);
  }
  std::ostream& out = o.out.empty() ? std::cout : file;

  farmsift::FeatureMatrix buffer;
  for (const auto& r : records) {
    const auto headline = farmsift::prepare_headline(
        r, lex ? &*lex : nullptr, overrides ? &*overrides : nullptr);
    farmsift::build_matrix_into(headline, table, feature_set, buffer);
    const double prob = farmsift::forward(params, buffer);
    char line[64];
    std::snprintf(line, sizeof line, "\t%.4f\t%d", prob, prob >= 0.5 ? 1 : 0);
    out << r.id << line << '\n';
  }
  return 0;
}

int cmd_stats(const Options& o) {
  const auto records = farmsift::load_corpus(o.corpus);
  const auto st = farmsift::stats(records);

  json report;
  const auto print_class = [&](const char* name,
                               const std::optional<farmsift::ClassStats>& cs) {
    if (!cs) return;
    std::printf("%s: %zu records, mean tokens %.6f\n", name, cs->count,
                cs->mean_tokens);
    json pos;
    for (int c = 0; c < farmsift::kPosCategoryCount; ++c) {
      const auto category = static_cast<farmsift::PosCategory>(c);
      std::printf("  %-10s %.6f\n",
                  std::string(farmsift::to_string(category)).c_str(),
                  cs->pos_means[static_cast<std::size_t>(c)]);
      pos[std::string(farmsift::to_string(category))] =
          cs->pos_means[static_cast<std::size_t>(c)];
    }
    report[name] = {{"count", cs->count},
                    {"mean_tokens", cs->mean_tokens},
                    {"pos_means", pos}};
  };
  print_class("credible", st.credible);
  print_class("farm", st.farm);

  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << report.dump(2) << '\n';
  }
  return 0;
}

int cmd_synth(const Options& o) {
  const auto corpus = farmsift::generate_synthetic_corpus(o.n_per_class,
                                                          o.seed, o.knobs);
  const fs::path out_dir(o.out);
  fs::create_directories(out_dir);
  farmsift::save_corpus(corpus.records, out_dir / "corpus.jsonl");

  farmsift::Lexicon lex;
  for (const auto& [word, score] : corpus.lexicon) lex.entries[word] = score;
  farmsift::save_lexicon(lex, out_dir / "lexicon.tsv");

  const auto table = farmsift::make_hash_table(
      corpus.vocabulary, o.dim, farmsift::rng::derive_seed(o.seed, "emb"));
  farmsift::save_embeddings(table, out_dir / "embeddings.txt");

  std::printf(
      "wrote %zu records, %zu lexicon entries, %zu x %d embeddings to %s\n",
      corpus.records.size(), lex.entries.size(), corpus.vocabulary.size(),
      o.dim, out_dir.string().c_str());
  return 0;
}

int cmd_gradcheck(const Options& o) {
  farmsift::GradCheckConfig config;
  config.configs = o.gc_configs;
  config.rows = o.gc_rows;
  config.feature_dim = o.gc_fdim;
  config.seed = o.seed;
  config.step = o.gc_step;
  config.tolerance = o.gc_tolerance;
  const auto result = farmsift::gradient_check(config);
  std::printf("checked %lld gradients over %d configs, max rel error %.3e\n",
              static_cast<long long>(result.params_checked), config.configs,
              result.max_rel_error);
  std::printf("%s (tolerance %.1e)\n", result.passed ? "PASS" : "FAIL",
              config.tolerance);
  return result.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"farmsift: credible-wire vs content-farm headline classifier"};
  app.set_config("--config", "", "read options from a key = value file");
  app.require_subcommand(1);

  const auto add_corpus = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--corpus", o.corpus, "corpus JSONL file")
                    ->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  const auto add_feature_opts = [&](CLI::App* cmd) {
    cmd->add_option("--lexicon", o.lexicon, "sentiment lexicon TSV")
        ->check(CLI::ExistingFile);
    cmd->add_option("--pos-override", o.pos_override,
                    "RAWTAG<TAB>CATEGORY override file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--embeddings", o.embeddings, "word embedding text file")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* train = app.add_subcommand("train", "train a classifier");
  add_corpus(train, true);
  add_feature_opts(train);
  train->add_option("--features", o.features, "emb | emb-pos | emb-pos-sent");
  train->add_option("--activation", o.activation, "sigmoid | tanh | relu");
  train->add_option("--optimizer", o.optimizer, "adam | sgd")
      ->check(CLI::IsMember({"adam", "sgd"}));
  train->add_option("--seed", o.seed, "run seed");
  train->add_option("--lr", o.lr, "learning rate");
  train->add_option("--batch", o.batch, "mini-batch size");
  train->add_option("--epochs", o.epochs, "max epochs");
  train->add_option("--patience", o.patience, "early-stop patience");
  train->add_option("--credible-domains", o.credible_domains,
                    "domains whose reposts are dropped from the farm class")
      ->delimiter(',');
  train->add_option("--out", o.out, "output directory");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_corpus(eval, true);
  add_feature_opts(eval);
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* eval_features =
      eval->add_option("--features", o.features, "must match the checkpoint");
  auto* eval_activation = eval->add_option("--activation", o.activation,
                                           "must match the checkpoint");
  eval->add_option("--seed", o.seed, "seed used when training");
  eval->add_option("--split", o.split, "train | validation | test | all");
  eval->add_option("--credible-domains", o.credible_domains, "")
      ->delimiter(',');

  std::string predict_input;
  auto* predict = app.add_subcommand("predict", "score tokenized headlines");
  predict->add_option("input", predict_input, "tokenized headline JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  add_feature_opts(predict);
  predict->add_option("--checkpoint", o.checkpoint, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* predict_features =
      predict->add_option("--features", o.features, "must match checkpoint");
  predict->add_option("--out", o.out, "write lines here instead of stdout");

  auto* stats = app.add_subcommand("stats", "per-class POS statistics");
  add_corpus(stats, true);
  stats->add_option("--out", o.out, "also write a JSON report");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--n", o.n_per_class, "records per class");
  synth->add_option("--seed", o.seed, "generator seed");
  synth->add_option("--dim", o.dim, "embedding dimension");
  synth->add_option("--punct-gap", o.knobs.punct_gap,
                    "extra punctuation per farm headline");
  synth->add_option("--adverb-gap", o.knobs.adverb_gap,
                    "extra adverbs per farm headline");
  synth->add_option("--word-gap", o.knobs.word_gap, "vocabulary skew");
  synth->add_option("--sent-gap", o.knobs.sentiment_gap,
                    "extra emotive-word probability");
  synth->add_option("--out", o.out, "output directory")->required();

  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient audit");
  gradcheck->add_option("--seed", o.seed, "config seed");
  gradcheck->add_option("--configs", o.gc_configs, "random configurations");
  gradcheck->add_option("--rows", o.gc_rows, "feature matrix rows");
  gradcheck->add_option("--fdim", o.gc_fdim, "feature width");
  gradcheck->add_option("--step", o.gc_step, "finite-difference step");
  gradcheck->add_option("--tolerance", o.gc_tolerance,
                        "max relative error allowed");

  CLI11_PARSE(app, argc, argv);

  // gradcheck defaults to seed 1 so its pinned audit seed differs from the
  // training default.
  if (gradcheck->parsed() && gradcheck->count("--seed") == 0) o.seed = 1;

  try {
    if (train->parsed()) return cmd_train(o);
    if (eval->parsed()) {
      return cmd_eval(o, eval_features->count() > 0,
                      eval_activation->count() > 0);
    }
    if (predict->parsed()) {
      return cmd_predict(o, predict_input, predict_features->count() > 0);
    }
    if (stats->parsed()) return cmd_stats(o);
    if (synth->parsed()) return cmd_synth(o);
    if (gradcheck->parsed()) return cmd_gradcheck(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
