#include "mtcnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mtcnn {

namespace {

template <typename S>
double eval_loss(const std::function<Tensor<S>(Graph<S>&)>& build_loss) {
  Graph<S> g(false);
  Tensor<S> loss = build_loss(g);
  double v = static_cast<double>(loss.item());
  if (!std::isfinite(v)) throw NumericError("check_gradients: non-finite loss");
  return v;
}

}  // namespace

template <typename S>
GradCheckResult check_gradients(const std::function<Tensor<S>(Graph<S>&)>& build_loss,
                                const std::vector<NamedParam<S>>& params, double h,
                                std::size_t min_samples, std::uint64_t seed) {
  // one backward pass for the analytic gradients
  for (const auto& p : params) {
    Tensor<S>& t = const_cast<Tensor<S>&>(p.tensor);
    t.zero_grad();
  }
  Graph<S> g(true);
  Tensor<S> loss = build_loss(g);
  if (!std::isfinite(static_cast<double>(loss.item())))
    throw NumericError("check_gradients: non-finite loss");
  g.backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) {
    Tensor<S>& t = const_cast<Tensor<S>&>(p.tensor);
    std::vector<double> grads(t.numel(), 0.0);
    if (t.has_grad()) {
      const S* gp = t.grad();
      for (std::size_t i = 0; i < t.numel(); ++i) grads[i] = static_cast<double>(gp[i]);
    }
    analytic.push_back(std::move(grads));
  }

  std::mt19937_64 rng(seed);
  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor<S>& t = const_cast<Tensor<S>&>(params[pi].tensor);
    const std::size_t n = t.numel();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (min_samples > 0 && n > min_samples) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(min_samples);
    }

    GradCheckEntry entry{params[pi].name, 0.0, idx.size()};
    for (std::size_t i : idx) {
      const S orig = t.data()[i];
      t.data()[i] = orig + static_cast<S>(h);
      const double fp = eval_loss(build_loss);
      t.data()[i] = orig - static_cast<S>(h);
      const double fm = eval_loss(build_loss);
      t.data()[i] = orig;

      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[pi][i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(a - numeric) / denom);
    }
    if (entry.max_rel_err > result.max_rel_err) {
      result.max_rel_err = entry.max_rel_err;
      result.worst_param = entry.name;
    }
    result.per_param.push_back(std::move(entry));
  }
  return result;
}

template GradCheckResult check_gradients<float>(const std::function<Tensor<float>(Graph<float>&)>&,
                                                const std::vector<NamedParam<float>>&, double,
                                                std::size_t, std::uint64_t);
template GradCheckResult check_gradients<double>(const std::function<Tensor<double>(Graph<double>&)>&,
                                                 const std::vector<NamedParam<double>>&, double,
                                                 std::size_t, std::uint64_t);

}  // namespace mtcnn
