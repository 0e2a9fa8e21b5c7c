#include "mtcnn/embedding.hpp"

#include <cmath>
#include <cstring>

namespace mtcnn {

PeMode pe_mode_from_string(const std::string& s) {
  if (s == "none") return PeMode::none;
  if (s == "fixed") return PeMode::fixed;
  if (s == "learnable") return PeMode::learnable;
  throw ConfigError("unknown positional encoding mode '" + s + "' (none|fixed|learnable)");
}

std::string pe_mode_to_string(PeMode m) {
  switch (m) {
    case PeMode::none: return "none";
    case PeMode::fixed: return "fixed";
    case PeMode::learnable: return "learnable";
  }
  return "?";
}

template <typename S>
void xavier_uniform(Tensor<S>& t, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (std::size_t i = 0; i < t.numel(); ++i) t.data()[i] = static_cast<S>(dist(rng));
}

template <typename S>
EmbeddingTables<S>::EmbeddingTables(std::size_t pages, std::size_t categories, std::size_t d_p,
                                    std::size_t d_c, std::size_t d_t, std::mt19937_64& rng) {
  page_table = Tensor<S>::zeros({pages + 1, d_p});
  category_table = Tensor<S>::zeros({categories + 1, d_c});
  time_table = Tensor<S>::zeros({1, d_t});
  xavier_uniform(page_table, pages + 1, d_p, rng);
  xavier_uniform(category_table, categories + 1, d_c, rng);
  xavier_uniform(time_table, 1, d_t, rng);
  page_table.set_requires_grad(true);
  category_table.set_requires_grad(true);
  time_table.set_requires_grad(true);
}

template <typename S>
Tensor<S> positional_matrix(PeMode mode, std::size_t n, std::size_t d, std::mt19937_64& rng) {
  auto m = Tensor<S>::zeros({n, d});
  if (mode == PeMode::none) return m;
  if (mode == PeMode::learnable) {
    std::uniform_real_distribution<double> dist(-0.02, 0.02);
    for (std::size_t i = 0; i < m.numel(); ++i) m.data()[i] = static_cast<S>(dist(rng));
    return m;
  }
  if (d % 2 != 0)
    throw ConfigError("fixed positional encoding requires an even dimension, got " + std::to_string(d));
  for (std::size_t pos = 0; pos < n; ++pos)
    for (std::size_t i = 0; i < d / 2; ++i) {
      const double angle =
          static_cast<double>(pos) / std::pow(10000.0, 2.0 * static_cast<double>(i) / static_cast<double>(d));
      m.at2(pos, 2 * i) = static_cast<S>(std::sin(angle));
      m.at2(pos, 2 * i + 1) = static_cast<S>(std::cos(angle));
    }
  return m;
}

template <typename S>
PositionalEncoder<S>::PositionalEncoder(PeMode mode_, std::size_t n, std::size_t d, std::mt19937_64& rng)
    : mode(mode_), matrix(positional_matrix<S>(mode_, n, d, rng)) {
  if (mode == PeMode::learnable) matrix.set_requires_grad(true);
}

template <typename S>
Tensor<S> embed_categorical(Graph<S>& g, const std::vector<std::int32_t>& ids, std::size_t batch,
                            std::size_t n, const Tensor<S>& table) {
  if (ids.size() != batch * n)
    throw ShapeError("embed_categorical: ids size " + std::to_string(ids.size()) + " != B*N");
  const std::size_t rows = table.dim(0), d = table.dim(1);
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= rows)
      throw DataError("embed_categorical: id " + std::to_string(ids[i]) + " out of range [0, " +
                      std::to_string(rows) + ")");

  auto out = Tensor<S>::zeros({batch, n, d});
  const S* tp = table.data();
  S* op = out.data();
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::memcpy(op + i * d, tp + static_cast<std::size_t>(ids[i]) * d, d * sizeof(S));

  if (g.grads_enabled() && table.requires_grad()) {
    out.set_requires_grad(true);
    Tensor<S> tc = table, oc = out;
    g.record([tc, oc, ids, d]() mutable {
      const S* go = oc.grad();
      S* gt = tc.grad();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        S* row = gt + static_cast<std::size_t>(ids[i]) * d;
        const S* src = go + i * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> embed_continuous(Graph<S>& g, const std::vector<double>& t_norm, std::size_t batch,
                           std::size_t n, const Tensor<S>& time_table) {
  if (t_norm.size() != batch * n)
    throw ShapeError("embed_continuous: values size " + std::to_string(t_norm.size()) + " != B*N");
  const std::size_t d = time_table.dim(1);

  auto out = Tensor<S>::zeros({batch, n, d});
  const S* tp = time_table.data();
  S* op = out.data();
  for (std::size_t i = 0; i < t_norm.size(); ++i) {
    const S v = static_cast<S>(t_norm[i]);
    for (std::size_t j = 0; j < d; ++j) op[i * d + j] = v * tp[j];
  }

  if (g.grads_enabled() && time_table.requires_grad()) {
    out.set_requires_grad(true);
    Tensor<S> tc = time_table, oc = out;
    g.record([tc, oc, t_norm, d]() mutable {
      const S* go = oc.grad();
      S* gt = tc.grad();
      for (std::size_t i = 0; i < t_norm.size(); ++i) {
        const S v = static_cast<S>(t_norm[i]);
        const S* src = go + i * d;
        for (std::size_t j = 0; j < d; ++j) gt[j] += v * src[j];
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> combine(Graph<S>& g, const Tensor<S>& page_e, const Tensor<S>& cat_e, const Tensor<S>& time_e) {
  const std::size_t batch = page_e.dim(0), n = page_e.dim(1);
  for (const Tensor<S>* t : {&cat_e, &time_e})
    if (t->dim(0) != batch || t->dim(1) != n)
      throw ShapeError("combine: mismatched batch/length: " + shape_str(page_e.shape()) + " vs " +
                       shape_str(t->shape()));
  const std::size_t dp = page_e.dim(2), dc = cat_e.dim(2), dt = time_e.dim(2);
  const std::size_t d = dp + dc + dt;

  auto out = Tensor<S>::zeros({batch, n, d});
  S* op = out.data();
  const S* pp = page_e.data();
  const S* cp = cat_e.data();
  const S* tp = time_e.data();
  for (std::size_t i = 0; i < batch * n; ++i) {
    std::memcpy(op + i * d, pp + i * dp, dp * sizeof(S));
    std::memcpy(op + i * d + dp, cp + i * dc, dc * sizeof(S));
    std::memcpy(op + i * d + dp + dc, tp + i * dt, dt * sizeof(S));
  }

  const bool any = g.grads_enabled() &&
                   (page_e.requires_grad() || cat_e.requires_grad() || time_e.requires_grad());
  if (any) {
    out.set_requires_grad(true);
    Tensor<S> pc = page_e, cc = cat_e, tc = time_e, oc = out;
    g.record([pc, cc, tc, oc, batch, n, dp, dc, dt, d]() mutable {
      const S* go = oc.grad();
      S* gp = pc.requires_grad() ? pc.grad() : nullptr;
      S* gc = cc.requires_grad() ? cc.grad() : nullptr;
      S* gt = tc.requires_grad() ? tc.grad() : nullptr;
      for (std::size_t i = 0; i < batch * n; ++i) {
        const S* src = go + i * d;
        if (gp)
          for (std::size_t j = 0; j < dp; ++j) gp[i * dp + j] += src[j];
        if (gc)
          for (std::size_t j = 0; j < dc; ++j) gc[i * dc + j] += src[dp + j];
        if (gt)
          for (std::size_t j = 0; j < dt; ++j) gt[i * dt + j] += src[dp + dc + j];
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> apply_pe(Graph<S>& g, const Tensor<S>& s, const Tensor<S>& pe) {
  const std::size_t batch = s.dim(0), n = s.dim(1), d = s.dim(2);
  if (pe.rank() != 2 || pe.dim(0) != n || pe.dim(1) != d)
    throw ShapeError("apply_pe: pe " + shape_str(pe.shape()) + " does not match input " +
                     shape_str(s.shape()));

  auto out = Tensor<S>::zeros({batch, n, d});
  const S* sp = s.data();
  const S* pp = pe.data();
  S* op = out.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const S* srow = sp + b * n * d;
    S* orow = op + b * n * d;
    for (std::size_t i = 0; i < n * d; ++i) orow[i] = srow[i] + pp[i];
  }

  const bool any = g.grads_enabled() && (s.requires_grad() || pe.requires_grad());
  if (any) {
    out.set_requires_grad(true);
    Tensor<S> sc = s, pc = pe, oc = out;
    g.record([sc, pc, oc, batch, n, d]() mutable {
      const S* go = oc.grad();
      if (sc.requires_grad()) {
        S* gs = sc.grad();
        for (std::size_t i = 0; i < batch * n * d; ++i) gs[i] += go[i];
      }
      if (pc.requires_grad()) {
        S* gp = pc.grad();
        for (std::size_t b = 0; b < batch; ++b) {
          const S* src = go + b * n * d;
          for (std::size_t i = 0; i < n * d; ++i) gp[i] += src[i];
        }
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> to_channel_major(Graph<S>& g, const Tensor<S>& s) {
  const std::size_t batch = s.dim(0), n = s.dim(1), d = s.dim(2);
  auto out = Tensor<S>::zeros({batch, d, n});
  const S* sp = s.data();
  S* op = out.data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) op[(b * d + j) * n + i] = sp[(b * n + i) * d + j];

  if (g.grads_enabled() && s.requires_grad()) {
    out.set_requires_grad(true);
    Tensor<S> sc = s, oc = out;
    g.record([sc, oc, batch, n, d]() mutable {
      const S* go = oc.grad();
      S* gs = sc.grad();
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < d; ++j) gs[(b * n + i) * d + j] += go[(b * d + j) * n + i];
    });
  }
  return out;
}

#define MTCNN_INSTANTIATE_EMBED(S)                                                                       \
  template void xavier_uniform<S>(Tensor<S>&, std::size_t, std::size_t, std::mt19937_64&);              \
  template struct EmbeddingTables<S>;                                                                    \
  template struct PositionalEncoder<S>;                                                                  \
  template Tensor<S> positional_matrix<S>(PeMode, std::size_t, std::size_t, std::mt19937_64&);           \
  template Tensor<S> embed_categorical<S>(Graph<S>&, const std::vector<std::int32_t>&, std::size_t,      \
                                          std::size_t, const Tensor<S>&);                                \
  template Tensor<S> embed_continuous<S>(Graph<S>&, const std::vector<double>&, std::size_t,             \
                                         std::size_t, const Tensor<S>&);                                 \
  template Tensor<S> combine<S>(Graph<S>&, const Tensor<S>&, const Tensor<S>&, const Tensor<S>&);        \
  template Tensor<S> apply_pe<S>(Graph<S>&, const Tensor<S>&, const Tensor<S>&);                         \
  template Tensor<S> to_channel_major<S>(Graph<S>&, const Tensor<S>&);

MTCNN_INSTANTIATE_EMBED(float)
MTCNN_INSTANTIATE_EMBED(double)

#undef MTCNN_INSTANTIATE_EMBED

}  // namespace mtcnn
