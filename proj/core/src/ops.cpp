#include "mtcnn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace mtcnn {

namespace {

template <typename S>
void expect_rank(const Tensor<S>& t, std::size_t r, const char* what) {
  if (t.rank() != r)
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(r) + ", got shape " +
                     shape_str(t.shape()));
}

template <typename S>
bool track(const Graph<S>& g, std::initializer_list<const Tensor<S>*> inputs) {
  if (!g.grads_enabled()) return false;
  for (const auto* t : inputs)
    if ((*t).requires_grad()) return true;
  return false;
}

}  // namespace

template <typename S>
Tensor<S> affine(Graph<S>& g, const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b) {
  expect_rank(x, 2, "affine: x");
  expect_rank(w, 2, "affine: W");
  expect_rank(b, 1, "affine: b");
  const std::size_t batch = x.dim(0), n = x.dim(1), m = w.dim(1);
  if (w.dim(0) != n || b.dim(0) != m)
    throw ShapeError("affine: x " + shape_str(x.shape()) + " incompatible with W " +
                     shape_str(w.shape()) + ", b " + shape_str(b.shape()));

  auto out = Tensor<S>::zeros({batch, m});
  {
    const S* xp = x.data();
    const S* wp = w.data();
    const S* bp = b.data();
    S* op = out.data();
    for (std::size_t i = 0; i < batch; ++i) {
      S* orow = op + i * m;
      std::memcpy(orow, bp, m * sizeof(S));
      const S* xrow = xp + i * n;
      for (std::size_t k = 0; k < n; ++k) {
        const S xv = xrow[k];
        const S* wrow = wp + k * m;
        for (std::size_t j = 0; j < m; ++j) orow[j] += xv * wrow[j];
      }
    }
  }

  if (track(g, {&x, &w, &b})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, wc = w, bc = b, oc = out;
    g.record([xc, wc, bc, oc, batch, n, m]() mutable {
      const S* go = oc.grad();
      const S* xp = xc.data();
      const S* wp = wc.data();
      if (xc.requires_grad()) {
        S* gx = xc.grad();
        for (std::size_t i = 0; i < batch; ++i)
          for (std::size_t k = 0; k < n; ++k) {
            const S* wrow = wp + k * m;
            const S* grow = go + i * m;
            S acc = 0;
            for (std::size_t j = 0; j < m; ++j) acc += grow[j] * wrow[j];
            gx[i * n + k] += acc;
          }
      }
      if (wc.requires_grad()) {
        S* gw = wc.grad();
        for (std::size_t i = 0; i < batch; ++i) {
          const S* xrow = xp + i * n;
          const S* grow = go + i * m;
          for (std::size_t k = 0; k < n; ++k) {
            const S xv = xrow[k];
            S* gwrow = gw + k * m;
            for (std::size_t j = 0; j < m; ++j) gwrow[j] += xv * grow[j];
          }
        }
      }
      if (bc.requires_grad()) {
        S* gb = bc.grad();
        for (std::size_t i = 0; i < batch; ++i) {
          const S* grow = go + i * m;
          for (std::size_t j = 0; j < m; ++j) gb[j] += grow[j];
        }
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> conv1d(Graph<S>& g, const Tensor<S>& x, const Tensor<S>& kernel, const Tensor<S>& bias) {
  expect_rank(x, 3, "conv1d: x");
  expect_rank(kernel, 3, "conv1d: kernel");
  expect_rank(bias, 1, "conv1d: bias");
  const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2);
  const std::size_t cout = kernel.dim(0), ksz = kernel.dim(2);
  if (kernel.dim(1) != cin)
    throw ShapeError("conv1d: kernel " + shape_str(kernel.shape()) + " does not match input channels of " +
                     shape_str(x.shape()));
  if (bias.dim(0) != cout)
    throw ShapeError("conv1d: bias " + shape_str(bias.shape()) + " does not match kernel " +
                     shape_str(kernel.shape()));
  if (len < ksz)
    throw ConfigError("conv1d: sequence shorter than kernel (L=" + std::to_string(len) +
                      ", k=" + std::to_string(ksz) + ")");
  const std::size_t tout = len - ksz + 1;

  auto out = Tensor<S>::zeros({batch, cout, tout});
  {
    // axpy over contiguous t keeps the inner loop vectorizable
    const S* xp = x.data();
    const S* kp = kernel.data();
    const S* bp = bias.data();
    S* op = out.data();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t o = 0; o < cout; ++o) {
        S* orow = op + (b * cout + o) * tout;
        const S bv = bp[o];
        for (std::size_t t = 0; t < tout; ++t) orow[t] = bv;
        for (std::size_t c = 0; c < cin; ++c) {
          const S* xrow = xp + (b * cin + c) * len;
          const S* krow = kp + (o * cin + c) * ksz;
          for (std::size_t tau = 0; tau < ksz; ++tau) {
            const S kv = krow[tau];
            const S* xs = xrow + tau;
            for (std::size_t t = 0; t < tout; ++t) orow[t] += kv * xs[t];
          }
        }
      }
    }
  }

  if (track(g, {&x, &kernel, &bias})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, kc = kernel, bc = bias, oc = out;
    g.record([xc, kc, bc, oc, batch, cin, len, cout, ksz, tout]() mutable {
      const S* go = oc.grad();
      if (xc.requires_grad()) {
        S* gx = xc.grad();
        const S* kp = kc.data();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t o = 0; o < cout; ++o) {
            const S* grow = go + (b * cout + o) * tout;
            for (std::size_t c = 0; c < cin; ++c) {
              S* gxrow = gx + (b * cin + c) * len;
              const S* krow = kp + (o * cin + c) * ksz;
              for (std::size_t tau = 0; tau < ksz; ++tau) {
                const S kv = krow[tau];
                S* gxs = gxrow + tau;
                for (std::size_t t = 0; t < tout; ++t) gxs[t] += kv * grow[t];
              }
            }
          }
      }
      if (kc.requires_grad()) {
        S* gk = kc.grad();
        const S* xp = xc.data();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t o = 0; o < cout; ++o) {
            const S* grow = go + (b * cout + o) * tout;
            for (std::size_t c = 0; c < cin; ++c) {
              const S* xrow = xp + (b * cin + c) * len;
              S* gkrow = gk + (o * cin + c) * ksz;
              for (std::size_t tau = 0; tau < ksz; ++tau) {
                const S* xs = xrow + tau;
                S acc = 0;
                for (std::size_t t = 0; t < tout; ++t) acc += xs[t] * grow[t];
                gkrow[tau] += acc;
              }
            }
          }
      }
      if (bc.requires_grad()) {
        S* gb = bc.grad();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t o = 0; o < cout; ++o) {
            const S* grow = go + (b * cout + o) * tout;
            S acc = 0;
            for (std::size_t t = 0; t < tout; ++t) acc += grow[t];
            gb[o] += acc;
          }
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> max_over_time(Graph<S>& g, const Tensor<S>& x, const std::vector<std::uint8_t>* mask) {
  expect_rank(x, 3, "max_over_time: x");
  const std::size_t batch = x.dim(0), ch = x.dim(1), tlen = x.dim(2);
  if (mask && mask->size() != batch * tlen)
    throw ShapeError("max_over_time: mask size " + std::to_string(mask->size()) + " != B*T = " +
                     std::to_string(batch * tlen));

  auto out = Tensor<S>::zeros({batch, ch});
  std::vector<std::uint32_t> argmax(batch * ch);
  {
    const S* xp = x.data();
    S* op = out.data();
    for (std::size_t b = 0; b < batch; ++b) {
      const std::uint8_t* mrow = mask ? mask->data() + b * tlen : nullptr;
      for (std::size_t c = 0; c < ch; ++c) {
        const S* xrow = xp + (b * ch + c) * tlen;
        S best = -std::numeric_limits<S>::infinity();
        std::size_t besti = tlen;  // sentinel: no valid position seen
        for (std::size_t t = 0; t < tlen; ++t) {
          if (mrow && !mrow[t]) continue;
          if (xrow[t] > best || besti == tlen) {
            best = xrow[t];
            besti = t;
          }
        }
        if (besti == tlen)
          throw DataError("max_over_time: fully masked row (sequence entirely padding), b=" +
                          std::to_string(b));
        op[b * ch + c] = best;
        argmax[b * ch + c] = static_cast<std::uint32_t>(besti);
      }
    }
  }

  if (track(g, {&x})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, oc = out;
    g.record([xc, oc, argmax = std::move(argmax), batch, ch, tlen]() mutable {
      const S* go = oc.grad();
      S* gx = xc.grad();
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < ch; ++c)
          gx[(b * ch + c) * tlen + argmax[b * ch + c]] += go[b * ch + c];
    });
  }
  return out;
}

template <typename S>
Tensor<S> batchnorm1d(Graph<S>& g, const Tensor<S>& x, const Tensor<S>& gamma, const Tensor<S>& beta,
                      BNState<S>& state, Mode mode) {
  expect_rank(x, 3, "batchnorm1d: x");
  const std::size_t batch = x.dim(0), ch = x.dim(1), tlen = x.dim(2);
  if (gamma.numel() != ch || beta.numel() != ch || state.running_mean.size() != ch)
    throw ShapeError("batchnorm1d: parameter size does not match channels of " + shape_str(x.shape()));
  const std::size_t n = batch * tlen;
  if (mode == Mode::train && n < 2)
    throw DataError("batchnorm1d: train mode requires B*T >= 2, got " + std::to_string(n));

  const S eps = static_cast<S>(kBnEps);
  auto out = Tensor<S>::zeros({batch, ch, tlen});
  std::vector<S> mean(ch), invstd(ch);

  const S* xp = x.data();
  const S* gp = gamma.data();
  const S* bp = beta.data();
  S* op = out.data();

  if (mode == Mode::train) {
    for (std::size_t c = 0; c < ch; ++c) {
      S m = 0;
      for (std::size_t b = 0; b < batch; ++b) {
        const S* xrow = xp + (b * ch + c) * tlen;
        for (std::size_t t = 0; t < tlen; ++t) m += xrow[t];
      }
      m /= static_cast<S>(n);
      S v = 0;
      for (std::size_t b = 0; b < batch; ++b) {
        const S* xrow = xp + (b * ch + c) * tlen;
        for (std::size_t t = 0; t < tlen; ++t) {
          const S d = xrow[t] - m;
          v += d * d;
        }
      }
      v /= static_cast<S>(n);  // biased variance for normalization
      mean[c] = m;
      invstd[c] = S(1) / std::sqrt(v + eps);
      const S mom = static_cast<S>(kBnMomentum);
      const S unbiased = (n > 1) ? v * static_cast<S>(n) / static_cast<S>(n - 1) : v;
      state.running_mean[c] = (S(1) - mom) * state.running_mean[c] + mom * m;
      state.running_var[c] = (S(1) - mom) * state.running_var[c] + mom * unbiased;
    }
  } else {
    for (std::size_t c = 0; c < ch; ++c) {
      mean[c] = state.running_mean[c];
      invstd[c] = S(1) / std::sqrt(state.running_var[c] + eps);
    }
  }

  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < ch; ++c) {
      const S* xrow = xp + (b * ch + c) * tlen;
      S* orow = op + (b * ch + c) * tlen;
      const S m = mean[c], is = invstd[c], ga = gp[c], be = bp[c];
      for (std::size_t t = 0; t < tlen; ++t) orow[t] = ga * (xrow[t] - m) * is + be;
    }

  if (track(g, {&x, &gamma, &beta})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, gc = gamma, bc = beta, oc = out;
    const bool train = (mode == Mode::train);
    g.record([xc, gc, bc, oc, mean = std::move(mean), invstd = std::move(invstd), batch, ch, tlen, n,
              train]() mutable {
      const S* go = oc.grad();
      const S* xp = xc.data();
      const S* gp = gc.data();
      // per-channel reductions shared by all input-gradient terms
      std::vector<S> sum_go(ch, S(0)), sum_go_xhat(ch, S(0));
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < ch; ++c) {
          const S* grow = go + (b * ch + c) * tlen;
          const S* xrow = xp + (b * ch + c) * tlen;
          const S m = mean[c], is = invstd[c];
          S s0 = 0, s1 = 0;
          for (std::size_t t = 0; t < tlen; ++t) {
            s0 += grow[t];
            s1 += grow[t] * (xrow[t] - m) * is;
          }
          sum_go[c] += s0;
          sum_go_xhat[c] += s1;
        }
      if (gc.requires_grad()) {
        S* gg = gc.grad();
        for (std::size_t c = 0; c < ch; ++c) gg[c] += sum_go_xhat[c];
      }
      if (bc.requires_grad()) {
        S* gb = bc.grad();
        for (std::size_t c = 0; c < ch; ++c) gb[c] += sum_go[c];
      }
      if (xc.requires_grad()) {
        S* gx = xc.grad();
        const S inv_n = S(1) / static_cast<S>(n);
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t c = 0; c < ch; ++c) {
            const S* grow = go + (b * ch + c) * tlen;
            const S* xrow = xp + (b * ch + c) * tlen;
            S* gxrow = gx + (b * ch + c) * tlen;
            const S m = mean[c], is = invstd[c], ga = gp[c];
            if (train) {
              // backward through the batch statistics
              const S k0 = sum_go[c] * inv_n;
              const S k1 = sum_go_xhat[c] * inv_n;
              for (std::size_t t = 0; t < tlen; ++t) {
                const S xhat = (xrow[t] - m) * is;
                gxrow[t] += ga * is * (grow[t] - k0 - xhat * k1);
              }
            } else {
              for (std::size_t t = 0; t < tlen; ++t) gxrow[t] += ga * is * grow[t];
            }
          }
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> relu(Graph<S>& g, const Tensor<S>& x) {
  auto out = Tensor<S>::zeros(x.shape());
  const std::size_t n = x.numel();
  const S* xp = x.data();
  S* op = out.data();
  for (std::size_t i = 0; i < n; ++i) op[i] = xp[i] > S(0) ? xp[i] : S(0);

  if (track(g, {&x})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, oc = out;
    g.record([xc, oc, n]() mutable {
      const S* go = oc.grad();
      const S* xp = xc.data();
      S* gx = xc.grad();
      for (std::size_t i = 0; i < n; ++i)
        if (xp[i] > S(0)) gx[i] += go[i];
    });
  }
  return out;
}

template <typename S>
Tensor<S> dropout(Graph<S>& g, const Tensor<S>& x, double rate, Mode mode, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout: rate must be in [0, 1), got " + std::to_string(rate));
  if (mode == Mode::eval || rate == 0.0) return x;

  const std::size_t n = x.numel();
  const S scale = static_cast<S>(1.0 / (1.0 - rate));
  std::vector<std::uint8_t> keep(n);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) keep[i] = uni(rng) >= rate ? 1 : 0;

  auto out = Tensor<S>::zeros(x.shape());
  const S* xp = x.data();
  S* op = out.data();
  for (std::size_t i = 0; i < n; ++i) op[i] = keep[i] ? xp[i] * scale : S(0);

  if (track(g, {&x})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, oc = out;
    g.record([xc, oc, keep = std::move(keep), scale, n]() mutable {
      const S* go = oc.grad();
      S* gx = xc.grad();
      for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) gx[i] += go[i] * scale;
    });
  }
  return out;
}

template <typename S>
Tensor<S> softmax_cross_entropy(Graph<S>& g, const Tensor<S>& logits, const std::vector<int>& labels) {
  expect_rank(logits, 2, "softmax_cross_entropy: logits");
  const std::size_t batch = logits.dim(0), k = logits.dim(1);
  if (labels.size() != batch)
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for batch " +
                     std::to_string(batch));
  for (std::size_t i = 0; i < batch; ++i)
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      throw DataError("softmax_cross_entropy: label " + std::to_string(labels[i]) + " out of range [0, " +
                      std::to_string(k) + ") at row " + std::to_string(i));

  const S* lp = logits.data();
  double total = 0;
  for (std::size_t i = 0; i < batch; ++i) {
    const S* row = lp + i * k;
    S m = row[0];
    for (std::size_t j = 1; j < k; ++j) m = std::max(m, row[j]);
    double sum = 0;
    for (std::size_t j = 0; j < k; ++j) sum += std::exp(static_cast<double>(row[j] - m));
    total += static_cast<double>(m) + std::log(sum) - static_cast<double>(row[labels[i]]);
  }
  auto out = Tensor<S>::scalar(static_cast<S>(total / static_cast<double>(batch)));

  if (track(g, {&logits})) {
    out.set_requires_grad(true);
    Tensor<S> lc = logits, oc = out;
    g.record([lc, oc, labels, batch, k]() mutable {
      const S up = oc.grad()[0];
      const S* lp = lc.data();
      S* gl = lc.grad();
      const S inv_b = S(1) / static_cast<S>(batch);
      for (std::size_t i = 0; i < batch; ++i) {
        const S* row = lp + i * k;
        S* grow = gl + i * k;
        S m = row[0];
        for (std::size_t j = 1; j < k; ++j) m = std::max(m, row[j]);
        double sum = 0;
        for (std::size_t j = 0; j < k; ++j) sum += std::exp(static_cast<double>(row[j] - m));
        for (std::size_t j = 0; j < k; ++j) {
          S p = static_cast<S>(std::exp(static_cast<double>(row[j] - m)) / sum);
          if (static_cast<std::size_t>(labels[i]) == j) p -= S(1);
          grow[j] += up * p * inv_b;
        }
      }
    });
  }
  return out;
}

template <typename S>
Tensor<S> weighted_sum(Graph<S>& g, const std::vector<Tensor<S>>& scalars, const std::vector<double>& weights) {
  if (scalars.size() != weights.size())
    throw ShapeError("weighted_sum: " + std::to_string(scalars.size()) + " terms vs " +
                     std::to_string(weights.size()) + " weights");
  double acc = 0;
  for (std::size_t i = 0; i < scalars.size(); ++i) acc += weights[i] * static_cast<double>(scalars[i].item());
  auto out = Tensor<S>::scalar(static_cast<S>(acc));

  bool any = false;
  if (g.grads_enabled())
    for (const auto& t : scalars) any = any || t.requires_grad();
  if (any) {
    out.set_requires_grad(true);
    std::vector<Tensor<S>> sc = scalars;
    Tensor<S> oc = out;
    g.record([sc, oc, weights]() mutable {
      const S up = oc.grad()[0];
      for (std::size_t i = 0; i < sc.size(); ++i)
        if (sc[i].requires_grad()) sc[i].grad()[0] += up * static_cast<S>(weights[i]);
    });
  }
  return out;
}

template <typename S>
Tensor<S> reduce_sum(Graph<S>& g, const Tensor<S>& x) {
  double acc = 0;
  const S* xp = x.data();
  for (std::size_t i = 0; i < x.numel(); ++i) acc += static_cast<double>(xp[i]);
  auto out = Tensor<S>::scalar(static_cast<S>(acc));

  if (track(g, {&x})) {
    out.set_requires_grad(true);
    Tensor<S> xc = x, oc = out;
    g.record([xc, oc]() mutable {
      const S up = oc.grad()[0];
      S* gx = xc.grad();
      for (std::size_t i = 0; i < xc.numel(); ++i) gx[i] += up;
    });
  }
  return out;
}

template <typename S>
Tensor<S> concat_cols(Graph<S>& g, const std::vector<Tensor<S>>& xs) {
  if (xs.empty()) throw ShapeError("concat_cols: empty input list");
  const std::size_t batch = xs[0].dim(0);
  std::size_t total = 0;
  for (const auto& t : xs) {
    if (t.rank() != 2 || t.dim(0) != batch)
      throw ShapeError("concat_cols: all inputs must be [B x C], got " + shape_str(t.shape()));
    total += t.dim(1);
  }
  auto out = Tensor<S>::zeros({batch, total});
  S* op = out.data();
  std::size_t off = 0;
  for (const auto& t : xs) {
    const std::size_t c = t.dim(1);
    const S* tp = t.data();
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(op + b * total + off, tp + b * c, c * sizeof(S));
    off += c;
  }

  bool any = false;
  if (g.grads_enabled())
    for (const auto& t : xs) any = any || t.requires_grad();
  if (any) {
    out.set_requires_grad(true);
    std::vector<Tensor<S>> xc = xs;
    Tensor<S> oc = out;
    g.record([xc, oc, batch, total]() mutable {
      const S* go = oc.grad();
      std::size_t off = 0;
      for (auto& t : xc) {
        const std::size_t c = t.dim(1);
        if (t.requires_grad()) {
          S* gt = t.grad();
          for (std::size_t b = 0; b < batch; ++b) {
            const S* src = go + b * total + off;
            S* dst = gt + b * c;
            for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
          }
        }
        off += c;
      }
    });
  }
  return out;
}

template <typename S>
std::vector<double> softmax_rows(const Tensor<S>& logits) {
  const std::size_t batch = logits.dim(0), k = logits.dim(1);
  std::vector<double> out(batch * k);
  const S* lp = logits.data();
  for (std::size_t i = 0; i < batch; ++i) {
    const S* row = lp + i * k;
    S m = row[0];
    for (std::size_t j = 1; j < k; ++j) m = std::max(m, row[j]);
    double sum = 0;
    for (std::size_t j = 0; j < k; ++j) sum += std::exp(static_cast<double>(row[j] - m));
    for (std::size_t j = 0; j < k; ++j)
      out[i * k + j] = std::exp(static_cast<double>(row[j] - m)) / sum;
  }
  return out;
}

#define MTCNN_INSTANTIATE_OPS(S)                                                                      \
  template Tensor<S> affine<S>(Graph<S>&, const Tensor<S>&, const Tensor<S>&, const Tensor<S>&);     \
  template Tensor<S> conv1d<S>(Graph<S>&, const Tensor<S>&, const Tensor<S>&, const Tensor<S>&);     \
  template Tensor<S> max_over_time<S>(Graph<S>&, const Tensor<S>&, const std::vector<std::uint8_t>*); \
  template Tensor<S> batchnorm1d<S>(Graph<S>&, const Tensor<S>&, const Tensor<S>&, const Tensor<S>&, \
                                    BNState<S>&, Mode);                                               \
  template Tensor<S> relu<S>(Graph<S>&, const Tensor<S>&);                                            \
  template Tensor<S> dropout<S>(Graph<S>&, const Tensor<S>&, double, Mode, std::mt19937_64&);         \
  template Tensor<S> softmax_cross_entropy<S>(Graph<S>&, const Tensor<S>&, const std::vector<int>&);  \
  template Tensor<S> weighted_sum<S>(Graph<S>&, const std::vector<Tensor<S>>&,                        \
                                     const std::vector<double>&);                                     \
  template Tensor<S> reduce_sum<S>(Graph<S>&, const Tensor<S>&);                                      \
  template Tensor<S> concat_cols<S>(Graph<S>&, const std::vector<Tensor<S>>&);                        \
  template std::vector<double> softmax_rows<S>(const Tensor<S>&);

MTCNN_INSTANTIATE_OPS(float)
MTCNN_INSTANTIATE_OPS(double)

#undef MTCNN_INSTANTIATE_OPS

}  // namespace mtcnn
