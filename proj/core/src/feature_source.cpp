#include <algorithm>
#include <cmath>
#include <numeric>

#include "collapse/error.hpp"
#include "collapse/sampling.hpp"
#include "collapse/sources.hpp"

namespace collapse {

FeatureDataset make_feature_dataset(const FeatureWorldParams& p) {
  if (p.classes < 2 || p.dim < 1) fail(ErrorKind::invalid_parameter, "feature world needs C >= 2, d >= 1");
  if (p.low_support < 1 || p.low_support >= p.classes)
    fail(ErrorKind::invalid_parameter, "world.low_support must be in [1, C)");
  Rng rng = Rng::derive(p.seed, 0xfea7);
  const auto C = static_cast<std::size_t>(p.classes);
  const auto d = static_cast<std::size_t>(p.dim);

  std::vector<std::vector<double>> means(C, std::vector<double>(d));
  for (auto& m : means)
    for (double& v : m) v = p.separation * rng.normal();

  FeatureDataset ds;
  ds.priors.resize(C);
  for (std::size_t c = 0; c < C; ++c) ds.priors[c] = 1.0 / std::pow(static_cast<double>(c) + 1.0, p.prior_zipf);
  const double z = std::accumulate(ds.priors.begin(), ds.priors.end(), 0.0);
  for (double& v : ds.priors) v /= z;
  for (int c = p.classes - p.low_support; c < p.classes; ++c) ds.low_support.push_back(c);

  auto draw_x = [&](std::size_t c) {
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = means[c][j] + p.noise * rng.normal();
    return x;
  };
  auto draw_set = [&](int n) {
    LabeledSet s;
    for (int i = 0; i < n; ++i) {
      const std::size_t c = sample_index(ds.priors, rng);
      s.examples.push_back({draw_x(c), static_cast<int>(c), std::nullopt});
    }
    return s;
  };
  ds.real = draw_set(p.real_pool);
  ds.validation = draw_set(p.validation);
  for (int i = 0; i < p.anchors; ++i) ds.anchors.items.push_back(draw_x(sample_index(ds.priors, rng)));
  for (const auto& ex : ds.validation.examples)
    if (std::find(ds.low_support.begin(), ds.low_support.end(), *ex.label) != ds.low_support.end())
      ds.tail_eval.examples.push_back(ex);
  if (ds.tail_eval.empty()) fail(ErrorKind::empty_data, "validation set has no low-support examples");
  return ds;
}

}  // namespace collapse
