// Command-line frontend for the behavioral sequence embedding pipeline:
// data generation, training, evaluation, embedding export, gradient
// checking, and parameter counting.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config/data error,
// 3 numeric runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtcnn/checkpoint.hpp"
#include "mtcnn/generator.hpp"
#include "mtcnn/metrics.hpp"
#include "mtcnn/runconfig.hpp"
#include "mtcnn/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace mtcnn;

namespace {

struct Flags {
  std::string config, data, val_data, vocab, checkpoint, out, spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> precision, weighting, pe;
  std::optional<std::size_t> epochs, batch, tasks;
  std::optional<double> lr;
  std::optional<std::size_t> pages, categories;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key-value configuration file");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output path");
  cmd->add_option("--data", f.data, "dataset path (JSONL)");
  cmd->add_option("--checkpoint", f.checkpoint, "checkpoint path");
  cmd->add_option("--precision", f.precision, "f32|f64")->check(CLI::IsMember({"f32", "f64"}));
}

RunConfig resolve(const Flags& f, const RunConfig& base = RunConfig{}) {
  RunConfig rc = RunConfig::load(f.config, base);
  if (!f.data.empty()) rc.data = f.data;
  if (!f.val_data.empty()) rc.val_data = f.val_data;
  if (!f.vocab.empty()) rc.vocab = f.vocab;
  if (!f.checkpoint.empty()) rc.checkpoint = f.checkpoint;
  if (!f.out.empty()) rc.out = f.out;
  if (!f.spec.empty()) rc.gen_spec = f.spec;
  if (f.seed) rc.seed = *f.seed;
  if (f.precision) rc.precision = *f.precision;
  if (f.weighting) rc.weighting = *f.weighting;
  if (f.pe) rc.model.pe_mode = pe_mode_from_string(*f.pe);
  if (f.epochs) rc.epochs = *f.epochs;
  if (f.batch) rc.batch = *f.batch;
  if (f.tasks) rc.model.tasks = *f.tasks;
  if (f.lr) rc.lr = *f.lr;
  if (f.pages) rc.vocab_pages = *f.pages;
  if (f.categories) rc.vocab_categories = *f.categories;
  return rc;
}

int cmd_gen_data(const Flags& f) {
  RunConfig rc = resolve(f);
  GeneratorSpec spec;
  if (!rc.gen_spec.empty()) spec = GeneratorSpec::from_file(rc.gen_spec);
  const std::string out_dir = rc.out.empty() ? "." : rc.out;
  fs::create_directories(out_dir);

  SyntheticDataset data = generate_synthetic(spec, rc.seed);
  write_jsonl(data.train, out_dir + "/train.jsonl");
  write_jsonl(data.test, out_dir + "/test.jsonl");
  std::ofstream mf(out_dir + "/manifest.json");
  if (!mf) throw FormatError("cannot write manifest: " + out_dir + "/manifest.json");
  mf << manifest_json(spec, data, rc.seed) << "\n";

  std::cout << "wrote " << data.train.size() << " train / " << data.test.size() << " test records to "
            << out_dir << "\n";
  return 0;
}

template <typename S>
int run_train(RunConfig& rc) {
  if (rc.data.empty()) throw ConfigError("train: --data is required");
  if (rc.checkpoint.empty()) rc.checkpoint = "model.mtc";
  if (rc.vocab.empty()) rc.vocab = rc.checkpoint + ".vocab";
  if (rc.out.empty()) rc.out = rc.checkpoint + ".log.jsonl";

  auto records = read_jsonl(rc.data);
  Vocabulary vocab = build_vocab(records, rc.min_count);
  vocab.save(rc.vocab);

  EncodedBatch train_set = encode_batch(records, vocab, rc.model.max_len, rc.model.tasks);
  EncodedBatch val_set;
  if (!rc.val_data.empty())
    val_set = encode_batch(read_jsonl(rc.val_data), vocab, rc.model.max_len, rc.model.tasks);

  MtcnnModel<S> model(rc.model, vocab.page_size(), vocab.category_size(), rc.seed);
  std::cout << "training " << model.parameter_count() << " parameters on " << train_set.batch
            << " records (" << precision_name<S>() << ")\n";

  std::ofstream log(rc.out, std::ios::trunc);
  if (!log) throw FormatError("cannot write training log: " + rc.out);
  auto options = rc.train_options();
  train<S>(model, train_set, val_set.batch ? &val_set : nullptr, options, [&](const EpochLog& e) {
    log << epoch_log_json(e) << "\n";
    log.flush();
    std::cout << "epoch " << e.epoch << "/" << options.epochs << " ce=[";
    for (std::size_t t = 0; t < e.task_ce.size(); ++t)
      std::cout << (t ? "," : "") << e.task_ce[t];
    std::cout << "]";
    if (!e.val_ks.empty()) {
      std::cout << " val_ks=[";
      for (std::size_t t = 0; t < e.val_ks.size(); ++t) std::cout << (t ? "," : "") << e.val_ks[t];
      std::cout << "]";
    }
    std::cout << " (" << e.wall_s << "s)\n";
  });

  save_checkpoint<S>(model, rc.checkpoint, vocab.hash());
  std::cout << "saved checkpoint to " << rc.checkpoint << "\n";
  return 0;
}

int cmd_train(const Flags& f) {
  RunConfig rc = resolve(f);
  if (rc.precision == "f64") return run_train<double>(rc);
  return run_train<float>(rc);
}

template <typename S>
ScoredRecords load_and_score(const RunConfig& rc, const CheckpointMeta& meta, bool with_vectors) {
  auto loaded = load_checkpoint<S>(rc.checkpoint);
  if (rc.vocab.empty()) throw ConfigError("--vocab is required");
  Vocabulary vocab = Vocabulary::load(rc.vocab);
  verify_vocab(meta, vocab.hash());
  auto records = read_jsonl(rc.data);
  EncodedBatch batch = encode_batch(records, vocab, meta.config.max_len, meta.config.tasks);
  return score_records<S>(loaded.model, batch, with_vectors);
}

int cmd_eval(const Flags& f) {
  if (f.checkpoint.empty() && f.config.empty()) throw ConfigError("eval: --checkpoint is required");
  RunConfig pre = resolve(f);
  if (pre.checkpoint.empty()) throw ConfigError("eval: --checkpoint is required");
  CheckpointMeta meta = read_checkpoint_meta(pre.checkpoint);

  // config-file model keys act as an expectation to verify, not an override
  RunConfig base;
  base.model = meta.config;
  RunConfig rc = resolve(f, base);
  verify_compatible(meta, rc.model);
  if (rc.data.empty()) throw ConfigError("eval: --data is required");

  ScoredRecords scored = meta.precision == "f64" ? load_and_score<double>(rc, meta, false)
                                                 : load_and_score<float>(rc, meta, false);

  std::vector<TaskMetrics> per_task;
  const std::size_t tasks = scored.tasks;
  for (std::size_t t = 0; t < tasks; ++t) {
    std::vector<double> s(scored.scores.size());
    std::vector<int> l(scored.scores.size());
    for (std::size_t i = 0; i < scored.scores.size(); ++i) {
      s[i] = scored.scores[i][t];
      l[i] = scored.labels[i * tasks + t];
    }
    per_task.push_back(evaluate_task(s, l, scored.amounts));
  }
  const std::string report = metrics_report_json(per_task);
  if (!rc.out.empty()) {
    std::ofstream out(rc.out);
    if (!out) throw FormatError("cannot write metrics report: " + rc.out);
    out << report << "\n";
    std::cout << "wrote metrics report to " << rc.out << "\n";
  } else {
    std::cout << report << "\n";
  }
  return 0;
}

int cmd_embed(const Flags& f) {
  RunConfig pre = resolve(f);
  if (pre.checkpoint.empty()) throw ConfigError("embed: --checkpoint is required");
  CheckpointMeta meta = read_checkpoint_meta(pre.checkpoint);
  RunConfig base;
  base.model = meta.config;
  RunConfig rc = resolve(f, base);
  verify_compatible(meta, rc.model);
  if (rc.data.empty()) throw ConfigError("embed: --data is required");
  if (rc.out.empty()) throw ConfigError("embed: --out is required");

  ScoredRecords scored = meta.precision == "f64" ? load_and_score<double>(rc, meta, true)
                                                 : load_and_score<float>(rc, meta, true);
  std::ofstream out(rc.out);
  if (!out) throw FormatError("cannot write embedding export: " + rc.out);
  for (std::size_t i = 0; i < scored.ids.size(); ++i) {
    nlohmann::json j = {
        {"id", scored.ids[i]}, {"scores", scored.scores[i]}, {"vector", scored.vectors[i]}};
    out << j.dump() << "\n";
  }
  std::cout << "wrote " << scored.ids.size() << " embedding rows to " << rc.out << "\n";
  return 0;
}

int cmd_gradcheck(const Flags& f) {
  const std::uint64_t seed = f.seed.value_or(7);
  GradCheckResult result = run_model_gradcheck(seed);
  for (const auto& e : result.per_param)
    std::printf("%-18s checked=%-4zu max_rel_err=%.3e\n", e.name.c_str(), e.checked, e.max_rel_err);
  std::printf("overall max_rel_err=%.3e (worst: %s)\n", result.max_rel_err, result.worst_param.c_str());
  if (!result.passed(1e-4)) {
    std::fprintf(stderr, "gradcheck FAILED: %s exceeds 1e-4\n", result.worst_param.c_str());
    return 1;
  }
  return 0;
}

int cmd_count_params(const Flags& f) {
  RunConfig rc = resolve(f);
  std::size_t pages = rc.vocab_pages, categories = rc.vocab_categories;
  if (!rc.vocab.empty()) {
    Vocabulary vocab = Vocabulary::load(rc.vocab);
    pages = vocab.page_size();
    categories = vocab.category_size();
  }
  ParamCount pc = count_params(rc.model, pages, categories);
  for (const auto& [name, n] : pc.components) std::printf("%-12s %10zu\n", name.c_str(), n);
  std::printf("%-12s %10zu\n", "total", pc.total);

  // closed form must agree with the real parameter enumeration
  MtcnnModel<float> model(rc.model, pages, categories, rc.seed);
  if (model.parameter_count() != pc.total)
    throw NumericError("count-params: closed form " + std::to_string(pc.total) +
                       " != enumerated " + std::to_string(model.parameter_count()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multitask CNN behavioral embedding model"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset with planted fraud motifs");
  add_common(gen, f);
  gen->add_option("--spec", f.spec, "generator spec file (key-value)");

  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(train_cmd, f);
  train_cmd->add_option("--val-data", f.val_data, "validation dataset (JSONL)");
  train_cmd->add_option("--vocab", f.vocab, "vocabulary output path");
  train_cmd->add_option("--epochs", f.epochs, "epoch budget");
  train_cmd->add_option("--batch", f.batch, "minibatch size");
  train_cmd->add_option("--lr", f.lr, "learning rate");
  train_cmd->add_option("--weighting", f.weighting, "rlw|uniform|fixed:<w1,..,wT>");
  train_cmd->add_option("--pe", f.pe, "none|fixed|learnable");
  train_cmd->add_option("--tasks", f.tasks, "task count");

  auto* eval_cmd = app.add_subcommand("eval", "score a dataset and write the metrics report");
  add_common(eval_cmd, f);
  eval_cmd->add_option("--vocab", f.vocab, "vocabulary path");

  auto* embed_cmd = app.add_subcommand("embed", "export per-record scores and shared vectors");
  add_common(embed_cmd, f);
  embed_cmd->add_option("--vocab", f.vocab, "vocabulary path");

  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the full model (f64)");
  add_common(gc, f);

  auto* cp = app.add_subcommand("count-params", "closed-form parameter count per component");
  add_common(cp, f);
  cp->add_option("--vocab", f.vocab, "vocabulary path (overrides --pages/--categories)");
  cp->add_option("--pages", f.pages, "page vocabulary size");
  cp->add_option("--categories", f.categories, "category vocabulary size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(f);
    if (train_cmd->parsed()) return cmd_train(f);
    if (eval_cmd->parsed()) return cmd_eval(f);
    if (embed_cmd->parsed()) return cmd_embed(f);
    if (gc->parsed()) return cmd_gradcheck(f);
    if (cp->parsed()) return cmd_count_params(f);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
