#include "mtcnn/runconfig.hpp"

namespace mtcnn {

RunConfig RunConfig::load(const std::string& config_path) { return load(config_path, RunConfig{}); }

RunConfig RunConfig::load(const std::string& config_path, const RunConfig& base) {
  if (config_path.empty()) return base;
  KvConfig kv = KvConfig::from_file(config_path);
  return from_kv(kv, base);
}

RunConfig RunConfig::from_kv(KvConfig& kv) { return from_kv(kv, RunConfig{}); }

RunConfig RunConfig::from_kv(KvConfig& kv, const RunConfig& base) {
  RunConfig c = base;
  c.data = kv.get_string("data", c.data);
  c.val_data = kv.get_string("val_data", c.val_data);
  c.vocab = kv.get_string("vocab", c.vocab);
  c.checkpoint = kv.get_string("checkpoint", c.checkpoint);
  c.out = kv.get_string("out", c.out);
  c.gen_spec = kv.get_string("gen_spec", c.gen_spec);

  c.model.max_len = static_cast<std::size_t>(kv.get_int("max_len", static_cast<long long>(c.model.max_len)));
  c.model.d_page = static_cast<std::size_t>(kv.get_int("d_page", static_cast<long long>(c.model.d_page)));
  c.model.d_category =
      static_cast<std::size_t>(kv.get_int("d_category", static_cast<long long>(c.model.d_category)));
  c.model.d_time = static_cast<std::size_t>(kv.get_int("d_time", static_cast<long long>(c.model.d_time)));
  {
    std::vector<long long> fallback(c.model.kernel_sizes.begin(), c.model.kernel_sizes.end());
    auto ks = kv.get_int_list("kernel_sizes", fallback);
    c.model.kernel_sizes.assign(ks.begin(), ks.end());
    fallback.assign(c.model.channels.begin(), c.model.channels.end());
    auto ch = kv.get_int_list("channels", fallback);
    c.model.channels.assign(ch.begin(), ch.end());
  }
  c.model.fc1_dim = static_cast<std::size_t>(kv.get_int("fc1_dim", static_cast<long long>(c.model.fc1_dim)));
  c.model.shared_dim =
      static_cast<std::size_t>(kv.get_int("shared_dim", static_cast<long long>(c.model.shared_dim)));
  c.model.tasks = static_cast<std::size_t>(kv.get_int("tasks", static_cast<long long>(c.model.tasks)));
  c.model.classes_per_task = static_cast<std::size_t>(
      kv.get_int("classes_per_task", static_cast<long long>(c.model.classes_per_task)));
  c.model.dropout_rate = kv.get_double("dropout", c.model.dropout_rate);
  c.model.pe_mode = pe_mode_from_string(kv.get_string("pe", pe_mode_to_string(c.model.pe_mode)));

  c.min_count = static_cast<std::size_t>(kv.get_int("min_count", static_cast<long long>(c.min_count)));
  c.vocab_pages = static_cast<std::size_t>(kv.get_int("vocab_pages", static_cast<long long>(c.vocab_pages)));
  c.vocab_categories =
      static_cast<std::size_t>(kv.get_int("vocab_categories", static_cast<long long>(c.vocab_categories)));

  c.lr = kv.get_double("lr", c.lr);
  c.batch = static_cast<std::size_t>(kv.get_int("batch", static_cast<long long>(c.batch)));
  c.epochs = static_cast<std::size_t>(kv.get_int("epochs", static_cast<long long>(c.epochs)));
  c.weighting = kv.get_string("weighting", c.weighting);
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
  c.precision = kv.get_string("precision", c.precision);
  if (c.precision != "f32" && c.precision != "f64")
    throw ConfigError("precision must be f32 or f64, got '" + c.precision + "'");

  kv.finish();
  return c;
}

TrainOptions RunConfig::train_options() const {
  TrainOptions opt;
  opt.batch_size = batch;
  opt.epochs = epochs;
  opt.lr = lr;
  opt.weighting = Weighting::parse(weighting, model.tasks);
  opt.seed = seed;
  return opt;
}

}  // namespace mtcnn
