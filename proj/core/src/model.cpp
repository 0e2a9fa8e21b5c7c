#include "mtcnn/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtcnn/kvconfig.hpp"

namespace mtcnn {

std::size_t ModelConfig::feature_dim() const {
  std::size_t f = 0;
  for (auto c : channels) f += c;
  return f;
}

void ModelConfig::validate() const {
  if (kernel_sizes.size() != channels.size())
    throw ConfigError("model: kernel_sizes and channels must have equal length");
  for (auto k : kernel_sizes)
    if (k == 0 || k > max_len)
      throw ConfigError("model: kernel size " + std::to_string(k) + " outside [1, N=" +
                        std::to_string(max_len) + "]");
  for (auto c : channels)
    if (c == 0) throw ConfigError("model: channel count must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw ConfigError("model: dropout_rate must be in [0, 1)");
  if (tasks == 0) throw ConfigError("model: tasks must be >= 1");
  if (classes_per_task < 2) throw ConfigError("model: classes_per_task must be >= 2");
  if (max_len == 0 || dim() == 0 || fc1_dim == 0 || shared_dim == 0)
    throw ConfigError("model: zero-sized dimension");
  if (pe_mode == PeMode::fixed && dim() % 2 != 0)
    throw ConfigError("model: fixed positional encoding requires an even embedding dimension, got " +
                      std::to_string(dim()));
}

namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& p : split(s, ','))
    if (!trim(p).empty()) out.push_back(static_cast<std::size_t>(std::stoull(trim(p))));
  return out;
}

}  // namespace

std::map<std::string, std::string> ModelConfig::to_map() const {
  return {
      {"max_len", std::to_string(max_len)},
      {"d_page", std::to_string(d_page)},
      {"d_category", std::to_string(d_category)},
      {"d_time", std::to_string(d_time)},
      {"kernel_sizes", join_sizes(kernel_sizes)},
      {"channels", join_sizes(channels)},
      {"fc1_dim", std::to_string(fc1_dim)},
      {"shared_dim", std::to_string(shared_dim)},
      {"tasks", std::to_string(tasks)},
      {"classes_per_task", std::to_string(classes_per_task)},
      {"dropout", std::to_string(dropout_rate)},
      {"pe", pe_mode_to_string(pe_mode)},
  };
}

ModelConfig ModelConfig::from_map(const std::map<std::string, std::string>& m) {
  ModelConfig c;
  auto need = [&m](const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) throw FormatError("model config: missing field '" + k + "'");
    return it->second;
  };
  c.max_len = std::stoull(need("max_len"));
  c.d_page = std::stoull(need("d_page"));
  c.d_category = std::stoull(need("d_category"));
  c.d_time = std::stoull(need("d_time"));
  c.kernel_sizes = parse_sizes(need("kernel_sizes"));
  c.channels = parse_sizes(need("channels"));
  c.fc1_dim = std::stoull(need("fc1_dim"));
  c.shared_dim = std::stoull(need("shared_dim"));
  c.tasks = std::stoull(need("tasks"));
  c.classes_per_task = std::stoull(need("classes_per_task"));
  c.dropout_rate = std::stod(need("dropout"));
  c.pe_mode = pe_mode_from_string(need("pe"));
  return c;
}

bool ModelConfig::operator==(const ModelConfig& other) const { return to_map() == other.to_map(); }

ParamCount count_params(const ModelConfig& config, std::size_t vocab_pages, std::size_t vocab_categories) {
  config.validate();
  ParamCount pc;
  const std::size_t d = config.dim();
  auto add = [&pc](const std::string& name, std::size_t n) {
    pc.components.emplace_back(name, n);
    pc.total += n;
  };
  add("embeddings", (vocab_pages + 1) * config.d_page + (vocab_categories + 1) * config.d_category +
                        1 * config.d_time);
  add("positional", config.pe_mode == PeMode::learnable ? config.max_len * d : 0);
  std::size_t conv = 0, bn = 0;
  for (std::size_t j = 0; j < config.kernel_sizes.size(); ++j) {
    conv += config.channels[j] * d * config.kernel_sizes[j] + config.channels[j];
    bn += 2 * config.channels[j];
  }
  add("conv", conv);
  add("batchnorm", bn);
  add("fc1", config.feature_dim() * config.fc1_dim + config.fc1_dim);
  add("fc2", config.fc1_dim * config.shared_dim + config.shared_dim);
  add("heads", config.tasks * (config.shared_dim * config.classes_per_task + config.classes_per_task));
  return pc;
}

std::vector<std::uint8_t> window_mask(const std::vector<std::uint8_t>& valid_mask, std::size_t batch,
                                      std::size_t n, std::size_t kernel) {
  const std::size_t tout = n - kernel + 1;
  std::vector<std::uint8_t> wm(batch * tout, 0);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::uint8_t* row = valid_mask.data() + b * n;
    // suffix "any valid at or after position i"
    // window t is valid iff some valid position lies in [t, t+kernel)
    std::size_t next_valid = n;  // index of the next valid position >= i
    std::vector<std::size_t> nv(n + 1, n);
    for (std::size_t i = n; i-- > 0;) {
      next_valid = row[i] ? i : next_valid;
      nv[i] = next_valid;
    }
    for (std::size_t t = 0; t < tout; ++t) wm[b * tout + t] = nv[t] < t + kernel ? 1 : 0;
  }
  return wm;
}

template <typename S>
MtcnnModel<S>::MtcnnModel(ModelConfig config, std::size_t vocab_pages, std::size_t vocab_categories,
                          std::uint64_t seed)
    : config_(std::move(config)), vocab_pages_(vocab_pages), vocab_categories_(vocab_categories) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const std::size_t d = config_.dim();

  embed_ = EmbeddingTables<S>(vocab_pages_, vocab_categories_, config_.d_page, config_.d_category,
                              config_.d_time, rng);
  pe_ = PositionalEncoder<S>(config_.pe_mode, config_.max_len, d, rng);

  for (std::size_t j = 0; j < config_.kernel_sizes.size(); ++j) {
    const std::size_t k = config_.kernel_sizes[j], c = config_.channels[j];
    auto w = Tensor<S>::zeros({c, d, k});
    xavier_uniform(w, d * k, c * k, rng);
    w.set_requires_grad(true);
    auto b = Tensor<S>::zeros({c});
    b.set_requires_grad(true);
    conv_w_.push_back(w);
    conv_b_.push_back(b);

    auto gamma = Tensor<S>::full({c}, S(1));
    gamma.set_requires_grad(true);
    auto beta = Tensor<S>::zeros({c});
    beta.set_requires_grad(true);
    bn_gamma_.push_back(gamma);
    bn_beta_.push_back(beta);
    bn_state_.emplace_back(c);
  }

  const std::size_t f = config_.feature_dim();
  fc1_w_ = Tensor<S>::zeros({f, config_.fc1_dim});
  xavier_uniform(fc1_w_, f, config_.fc1_dim, rng);
  fc1_w_.set_requires_grad(true);
  fc1_b_ = Tensor<S>::zeros({config_.fc1_dim});
  fc1_b_.set_requires_grad(true);
  fc2_w_ = Tensor<S>::zeros({config_.fc1_dim, config_.shared_dim});
  xavier_uniform(fc2_w_, config_.fc1_dim, config_.shared_dim, rng);
  fc2_w_.set_requires_grad(true);
  fc2_b_ = Tensor<S>::zeros({config_.shared_dim});
  fc2_b_.set_requires_grad(true);

  for (std::size_t t = 0; t < config_.tasks; ++t) {
    auto w = Tensor<S>::zeros({config_.shared_dim, config_.classes_per_task});
    xavier_uniform(w, config_.shared_dim, config_.classes_per_task, rng);
    w.set_requires_grad(true);
    auto b = Tensor<S>::zeros({config_.classes_per_task});
    b.set_requires_grad(true);
    head_w_.push_back(w);
    head_b_.push_back(b);
  }
}

template <typename S>
Tensor<S> MtcnnModel<S>::conv_block(Graph<S>& g, const Tensor<S>& s, std::size_t block,
                                    const std::vector<std::uint8_t>& valid_mask, Mode mode) {
  const std::size_t batch = s.dim(0), n = s.dim(2);
  const std::size_t k = config_.kernel_sizes[block];
  auto conv = conv1d(g, s, conv_w_[block], conv_b_[block]);
  auto bn = batchnorm1d(g, conv, bn_gamma_[block], bn_beta_[block], bn_state_[block], mode);
  auto wm = window_mask(valid_mask, batch, n, k);
  auto pooled = max_over_time(g, bn, &wm);
  return relu(g, pooled);
}

template <typename S>
ForwardResult<S> MtcnnModel<S>::forward(Graph<S>& g, const EncodedBatch& batch, Mode mode,
                                        std::mt19937_64* dropout_rng) {
  if (batch.length != config_.max_len)
    throw ShapeError("forward: batch encoded with N=" + std::to_string(batch.length) +
                     ", model expects N=" + std::to_string(config_.max_len));
  if (mode == Mode::train && config_.dropout_rate > 0.0 && dropout_rng == nullptr)
    throw ConfigError("forward: train mode with dropout requires an RNG");

  const std::size_t bsz = batch.batch, n = batch.length;
  auto page_e = embed_categorical(g, batch.page_ids, bsz, n, embed_.page_table);
  auto cat_e = embed_categorical(g, batch.category_ids, bsz, n, embed_.category_table);
  auto time_e = embed_continuous(g, batch.dwell_norm, bsz, n, embed_.time_table);
  auto s = combine(g, page_e, cat_e, time_e);
  if (pe_.mode != PeMode::none) s = apply_pe(g, s, pe_.matrix);
  auto cm = to_channel_major(g, s);

  std::vector<Tensor<S>> features;
  for (std::size_t j = 0; j < config_.kernel_sizes.size(); ++j)
    features.push_back(conv_block(g, cm, j, batch.valid_mask, mode));
  auto f = concat_cols(g, features);

  auto h = relu(g, affine(g, f, fc1_w_, fc1_b_));
  if (mode == Mode::train && config_.dropout_rate > 0.0)
    h = dropout(g, h, config_.dropout_rate, mode, *dropout_rng);
  auto shared = affine(g, h, fc2_w_, fc2_b_);

  ForwardResult<S> out;
  out.shared = shared;
  for (std::size_t t = 0; t < config_.tasks; ++t)
    out.logits.push_back(affine(g, shared, head_w_[t], head_b_[t]));
  return out;
}

template <typename S>
std::vector<NamedParam<S>> MtcnnModel<S>::named_params() {
  std::vector<NamedParam<S>> out;
  out.push_back({"embed.page", embed_.page_table});
  out.push_back({"embed.category", embed_.category_table});
  out.push_back({"embed.time", embed_.time_table});
  if (pe_.mode == PeMode::learnable) out.push_back({"pe.matrix", pe_.matrix});
  for (std::size_t j = 0; j < conv_w_.size(); ++j) {
    const std::string p = "conv" + std::to_string(j);
    out.push_back({p + ".weight", conv_w_[j]});
    out.push_back({p + ".bias", conv_b_[j]});
    out.push_back({"bn" + std::to_string(j) + ".gamma", bn_gamma_[j]});
    out.push_back({"bn" + std::to_string(j) + ".beta", bn_beta_[j]});
  }
  out.push_back({"fc1.weight", fc1_w_});
  out.push_back({"fc1.bias", fc1_b_});
  out.push_back({"fc2.weight", fc2_w_});
  out.push_back({"fc2.bias", fc2_b_});
  for (std::size_t t = 0; t < head_w_.size(); ++t) {
    const std::string p = "head" + std::to_string(t);
    out.push_back({p + ".weight", head_w_[t]});
    out.push_back({p + ".bias", head_b_[t]});
  }
  return out;
}

template <typename S>
std::vector<std::pair<std::string, std::vector<S>*>> MtcnnModel<S>::named_buffers() {
  std::vector<std::pair<std::string, std::vector<S>*>> out;
  for (std::size_t j = 0; j < bn_state_.size(); ++j) {
    out.emplace_back("bn" + std::to_string(j) + ".running_mean", &bn_state_[j].running_mean);
    out.emplace_back("bn" + std::to_string(j) + ".running_var", &bn_state_[j].running_var);
  }
  return out;
}

template <typename S>
std::size_t MtcnnModel<S>::parameter_count() {
  std::size_t n = 0;
  for (auto& p : named_params()) n += p.tensor.numel();
  return n;
}

template <typename S>
ScoredRecords score_records(MtcnnModel<S>& model, const EncodedBatch& batch, bool with_vectors,
                            std::size_t minibatch) {
  ScoredRecords out;
  out.tasks = model.config().tasks;
  out.ids = batch.record_ids;
  out.labels = batch.labels;
  out.amounts = batch.amounts;
  out.scores.resize(batch.batch);
  if (with_vectors) out.vectors.resize(batch.batch);

  const std::size_t classes = model.config().classes_per_task;
  for (std::size_t start = 0; start < batch.batch; start += minibatch) {
    const std::size_t stop = std::min(batch.batch, start + minibatch);
    std::vector<std::size_t> rows(stop - start);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = start + i;
    EncodedBatch mb = gather_rows(batch, rows);

    Graph<S> g(false);
    auto result = model.forward(g, mb, Mode::eval);
    std::vector<std::vector<double>> probs;
    for (auto& lt : result.logits) probs.push_back(softmax_rows(lt));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto& s = out.scores[start + i];
      s.resize(out.tasks);
      for (std::size_t t = 0; t < out.tasks; ++t) s[t] = probs[t][i * classes + 1];
      if (with_vectors) {
        auto& v = out.vectors[start + i];
        v.resize(model.config().shared_dim);
        for (std::size_t j = 0; j < v.size(); ++j)
          v[j] = static_cast<double>(result.shared.at2(i, j));
      }
    }
  }
  return out;
}

template <typename S>
void export_embedding(MtcnnModel<S>& model, const EncodedBatch& batch, const std::string& path) {
  ScoredRecords scored = score_records(model, batch, /*with_vectors=*/true);
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write embedding export: " + path);
  for (std::size_t i = 0; i < scored.ids.size(); ++i) {
    nlohmann::json j = {{"id", scored.ids[i]}, {"scores", scored.scores[i]}, {"vector", scored.vectors[i]}};
    out << j.dump() << "\n";
  }
}

#define MTCNN_INSTANTIATE_MODEL(S)                                                                \
  template class MtcnnModel<S>;                                                                   \
  template ScoredRecords score_records<S>(MtcnnModel<S>&, const EncodedBatch&, bool, std::size_t); \
  template void export_embedding<S>(MtcnnModel<S>&, const EncodedBatch&, const std::string&);

MTCNN_INSTANTIATE_MODEL(float)
MTCNN_INSTANTIATE_MODEL(double)

#undef MTCNN_INSTANTIATE_MODEL

}  // namespace mtcnn
