#include "mtcnn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "mtcnn/kvconfig.hpp"

namespace mtcnn {

namespace {

constexpr char kMagic[4] = {'M', 'T', 'C', '1'};
constexpr std::uint32_t kVersion = 1;

enum ArrayKind : std::uint8_t { kParam = 0, kBuffer = 1, kAdamM = 2, kAdamV = 3 };

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, std::size_t limit) : buf_(buf), limit_(limit) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > limit_) throw FormatError("checkpoint: truncated file");
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_bytes(std::size_t n) {
    if (pos_ + n > limit_) throw FormatError("checkpoint: truncated file");
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  const char* raw(std::size_t n) {
    if (pos_ + n > limit_) throw FormatError("checkpoint: truncated file");
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == limit_; }

 private:
  const std::string& buf_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

std::string config_block(const CheckpointMeta& meta) {
  std::ostringstream os;
  for (const auto& [k, v] : meta.config.to_map()) os << k << "=" << v << "\n";
  os << "precision=" << meta.precision << "\n";
  os << "vocab_pages=" << meta.vocab_pages << "\n";
  os << "vocab_categories=" << meta.vocab_categories << "\n";
  os << "vocab_hash=" << meta.vocab_hash << "\n";
  os << "has_optimizer=" << (meta.has_optimizer ? 1 : 0) << "\n";
  os << "adam_step=" << meta.adam_step << "\n";
  os << "adam_lr=" << meta.adam_lr << "\n";
  return os.str();
}

CheckpointMeta parse_config_block(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("checkpoint: malformed config line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  CheckpointMeta meta;
  meta.config = ModelConfig::from_map(kv);
  auto need = [&kv](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw FormatError("checkpoint: missing config field '" + k + "'");
    return it->second;
  };
  meta.precision = need("precision");
  meta.vocab_pages = std::stoull(need("vocab_pages"));
  meta.vocab_categories = std::stoull(need("vocab_categories"));
  meta.vocab_hash = std::stoull(need("vocab_hash"));
  meta.has_optimizer = need("has_optimizer") == "1";
  meta.adam_step = std::stoll(need("adam_step"));
  meta.adam_lr = std::stod(need("adam_lr"));
  return meta;
}

template <typename S>
void append_array(std::string& out, const std::string& name, ArrayKind kind, const Shape& shape,
                  const S* data, std::size_t count) {
  put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
  out.append(name);
  put<std::uint8_t>(out, kind);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(sizeof(S)));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) put<std::uint64_t>(out, static_cast<std::uint64_t>(d));
  out.append(reinterpret_cast<const char*>(data), count * sizeof(S));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Reader open_checked(const std::string& buf, const std::string& path) {
  if (buf.size() < sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t))
    throw FormatError("checkpoint: truncated file: " + path);
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("checkpoint: bad magic bytes: " + path);
  const std::size_t payload = buf.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + payload, sizeof(stored));
  if (stored != fnv1a(buf.data(), payload))
    throw FormatError("checkpoint: checksum mismatch (corrupt or truncated): " + path);
  Reader r(buf, payload);
  r.raw(sizeof(kMagic));
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  return r;
}

}  // namespace

CheckpointMeta read_checkpoint_meta(const std::string& path) {
  const std::string buf = read_file(path);
  Reader r = open_checked(buf, path);
  const auto config_len = r.get<std::uint64_t>();
  CheckpointMeta meta = parse_config_block(r.get_bytes(config_len));
  return meta;
}

template <typename S>
void save_checkpoint(MtcnnModel<S>& model, const std::string& path, std::uint64_t vocab_hash,
                     const AdamState<S>* adam) {
  CheckpointMeta meta;
  meta.config = model.config();
  meta.precision = precision_name<S>();
  meta.vocab_pages = model.vocab_pages();
  meta.vocab_categories = model.vocab_categories();
  meta.vocab_hash = vocab_hash;
  meta.has_optimizer = adam != nullptr;
  meta.adam_step = adam ? adam->step : 0;
  meta.adam_lr = adam ? adam->lr : 0.0;

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  const std::string cfg = config_block(meta);
  put<std::uint64_t>(out, cfg.size());
  out.append(cfg);

  auto params = model.named_params();
  auto buffers = model.named_buffers();
  std::uint32_t count = static_cast<std::uint32_t>(params.size() + buffers.size());
  if (adam) count += static_cast<std::uint32_t>(2 * params.size());
  put<std::uint32_t>(out, count);

  for (auto& p : params)
    append_array(out, p.name, kParam, p.tensor.shape(), p.tensor.data(), p.tensor.numel());
  for (auto& [name, vec] : buffers) append_array(out, name, kBuffer, {vec->size()}, vec->data(), vec->size());
  if (adam)
    for (std::size_t i = 0; i < params.size(); ++i) {
      append_array(out, params[i].name, kAdamM, {adam->m[i].size()}, adam->m[i].data(), adam->m[i].size());
      append_array(out, params[i].name, kAdamV, {adam->v[i].size()}, adam->v[i].data(), adam->v[i].size());
    }

  put<std::uint64_t>(out, fnv1a(out.data(), out.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write checkpoint: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError("checkpoint write failed: " + path);
}

template <typename S>
LoadedModel<S> load_checkpoint(const std::string& path) {
  const std::string buf = read_file(path);
  Reader r = open_checked(buf, path);
  const auto config_len = r.get<std::uint64_t>();
  CheckpointMeta meta = parse_config_block(r.get_bytes(config_len));
  if (meta.precision != precision_name<S>())
    throw CompatError("checkpoint precision " + meta.precision + " does not match requested " +
                      precision_name<S>());

  LoadedModel<S> loaded;
  loaded.meta = meta;
  loaded.model = MtcnnModel<S>(meta.config, meta.vocab_pages, meta.vocab_categories, /*seed=*/0);
  if (meta.has_optimizer) {
    loaded.adam.emplace();
    loaded.adam->init(loaded.model.named_params());
    loaded.adam->step = meta.adam_step;
    loaded.adam->lr = meta.adam_lr;
  }

  auto params = loaded.model.named_params();
  auto buffers = loaded.model.named_buffers();
  std::vector<bool> param_seen(params.size(), false), buffer_seen(buffers.size(), false);

  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t a = 0; a < count; ++a) {
    const auto name_len = r.get<std::uint16_t>();
    const std::string name = r.get_bytes(name_len);
    const auto kind = r.get<std::uint8_t>();
    const auto width = r.get<std::uint8_t>();
    const auto ndim = r.get<std::uint32_t>();
    Shape shape(ndim);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(r.get<std::uint64_t>());
      numel *= d;
    }
    if (width != sizeof(S))
      throw CompatError("checkpoint: array '" + name + "' has element width " + std::to_string(width));
    const char* raw = r.raw(numel * sizeof(S));

    auto fill = [&](S* dst, std::size_t n, const Shape& expect) {
      if (numel != n || (!expect.empty() && shape != expect))
        throw CompatError("checkpoint: array '" + name + "' shape " + shape_str(shape) +
                          " does not match model");
      std::memcpy(dst, raw, n * sizeof(S));
    };

    bool handled = false;
    if (kind == kParam || kind == kAdamM || kind == kAdamV) {
      for (std::size_t i = 0; i < params.size() && !handled; ++i) {
        if (params[i].name != name) continue;
        handled = true;
        if (kind == kParam) {
          fill(params[i].tensor.data(), params[i].tensor.numel(), params[i].tensor.shape());
          param_seen[i] = true;
        } else if (loaded.adam) {
          auto& vec = (kind == kAdamM) ? loaded.adam->m[i] : loaded.adam->v[i];
          fill(vec.data(), vec.size(), {});
        }
      }
    } else if (kind == kBuffer) {
      for (std::size_t i = 0; i < buffers.size() && !handled; ++i) {
        if (buffers[i].first != name) continue;
        handled = true;
        fill(buffers[i].second->data(), buffers[i].second->size(), {});
        buffer_seen[i] = true;
      }
    }
    if (!handled) throw CompatError("checkpoint: array '" + name + "' has no matching model entry");
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!param_seen[i]) throw CompatError("checkpoint: missing parameter '" + params[i].name + "'");
  for (std::size_t i = 0; i < buffers.size(); ++i)
    if (!buffer_seen[i]) throw CompatError("checkpoint: missing buffer '" + buffers[i].first + "'");
  return loaded;
}

void verify_compatible(const CheckpointMeta& meta, const ModelConfig& expected) {
  if (!(meta.config == expected)) {
    const auto a = meta.config.to_map(), b = expected.to_map();
    for (const auto& [k, v] : a) {
      const auto it = b.find(k);
      if (it != b.end() && it->second != v)
        throw CompatError("checkpoint config mismatch on '" + k + "': checkpoint has " + v +
                          ", expected " + it->second);
    }
    throw CompatError("checkpoint config mismatch");
  }
}

void verify_vocab(const CheckpointMeta& meta, std::uint64_t vocab_hash) {
  if (meta.vocab_hash != vocab_hash)
    throw CompatError("checkpoint was trained with a different vocabulary (hash mismatch)");
}

template void save_checkpoint<float>(MtcnnModel<float>&, const std::string&, std::uint64_t,
                                     const AdamState<float>*);
template void save_checkpoint<double>(MtcnnModel<double>&, const std::string&, std::uint64_t,
                                      const AdamState<double>*);
template LoadedModel<float> load_checkpoint<float>(const std::string&);
template LoadedModel<double> load_checkpoint<double>(const std::string&);

}  // namespace mtcnn
