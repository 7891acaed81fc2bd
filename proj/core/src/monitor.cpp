#include "collapse/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "collapse/error.hpp"
#include "collapse/sampling.hpp"

namespace collapse {

void MonitorConfig::validate() const {
  if (window < 1) fail(ErrorKind::invalid_parameter, "monitor.window must be >= 1");
  if (!(epsilon > 0.0)) fail(ErrorKind::invalid_parameter, "monitor.epsilon must be > 0");
  if (!(rare_percentile > 0.0 && rare_percentile < 100.0))
    fail(ErrorKind::invalid_parameter, "monitor.rare_percentile must be in (0, 100)");
  if (ece_bins < 1) fail(ErrorKind::invalid_parameter, "monitor.ece_bins must be >= 1");
  if (!(tail_threshold > 0.0 && tail_threshold < 1.0))
    fail(ErrorKind::invalid_parameter, "monitor.tail_threshold must be in (0, 1)");
}

double anchor_entropy(const MarkovTextLearner& learner, const TextAnchors& anchors) {
  if (anchors.items.empty()) fail(ErrorKind::empty_data, "anchor set is empty");
  double h = 0.0;
  for (const auto& a : anchors.items) h += entropy(learner.predict_dist(a));
  return h / static_cast<double>(anchors.items.size());
}

double anchor_entropy(const SoftmaxClassifierLearner& learner, const FeatureAnchors& anchors) {
  if (anchors.items.empty()) fail(ErrorKind::empty_data, "anchor set is empty");
  double h = 0.0;
  for (const auto& a : anchors.items) h += entropy(learner.predict_dist(a));
  return h / static_cast<double>(anchors.items.size());
}

double drift(const std::vector<std::vector<double>>& z, int g, int window, double epsilon) {
  if (window < 1) fail(ErrorKind::invalid_parameter, "window must be >= 1");
  if (g - window < 0 || static_cast<std::size_t>(g) >= z.size())
    fail(ErrorKind::not_enough_history, "drift at g=" + std::to_string(g) + " needs z_" +
                                            std::to_string(g - window) + ".." + std::to_string(g));
  double s = 0.0;
  for (int k = 0; k < window; ++k) {
    const auto& cur = z[static_cast<std::size_t>(g - k)];
    const auto& prev = z[static_cast<std::size_t>(g - k - 1)];
    if (cur.size() != prev.size()) fail(ErrorKind::malformed_input, "representation dimensions differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double d = cur[i] - prev[i];
      num += d * d;
      den += prev[i] * prev[i];
    }
    s += num / (den + epsilon);
  }
  return s / window;
}

double perplexity(const MarkovTextLearner& learner, const Corpus& validation) {
  if (validation.empty() || validation.token_count() == 0)
    fail(ErrorKind::empty_data, "validation corpus is empty");
  const auto [ll, n] = learner.log_likelihood(validation);
  return std::exp(-ll / static_cast<double>(n));
}

double perplexity(const SoftmaxClassifierLearner& learner, const LabeledSet& validation) {
  if (validation.empty()) fail(ErrorKind::empty_data, "validation set is empty");
  return std::exp(learner.loss(validation));
}

double percentile(std::vector<double> v, double pct) {
  if (v.empty()) fail(ErrorKind::empty_data, "percentile of empty set");
  std::sort(v.begin(), v.end());
  const double pos = pct / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double rare_token_mass(const Corpus& sample, const std::vector<double>& train_freq, double pct) {
  if (sample.token_count() == 0) fail(ErrorKind::empty_data, "sample is empty");
  if (train_freq.empty()) fail(ErrorKind::empty_data, "frequency table is empty");
  const double cut = percentile(train_freq, pct);
  std::size_t rare = 0, total = 0;
  for (const auto& s : sample.sequences)
    for (Token t : s) {
      if (t < 0 || static_cast<std::size_t>(t) >= train_freq.size())
        fail(ErrorKind::malformed_input, "token outside frequency table");
      rare += train_freq[static_cast<std::size_t>(t)] < cut ? 1 : 0;
      ++total;
    }
  return static_cast<double>(rare) / static_cast<double>(total);
}

double tail_coverage(const std::vector<std::vector<double>>& predictions,
                     const std::vector<int>& low_support, double threshold) {
  if (low_support.empty()) fail(ErrorKind::empty_data, "low-support class set is empty");
  if (predictions.empty()) fail(ErrorKind::empty_data, "evaluation set is empty");
  std::size_t covered = 0;
  for (int c : low_support) {
    double mean = 0.0;
    for (const auto& p : predictions) {
      if (c < 0 || static_cast<std::size_t>(c) >= p.size()) fail(ErrorKind::malformed_input, "class out of range");
      mean += p[static_cast<std::size_t>(c)];
    }
    mean /= static_cast<double>(predictions.size());
    covered += mean > threshold ? 1 : 0;
  }
  return static_cast<double>(covered) / static_cast<double>(low_support.size());
}

double tail_coverage(const SoftmaxClassifierLearner& learner, const LabeledSet& eval,
                     const std::vector<int>& low_support, double threshold) {
  std::vector<std::vector<double>> preds;
  preds.reserve(eval.size());
  for (const auto& ex : eval.examples) preds.push_back(learner.predict_dist(ex.features));
  return tail_coverage(preds, low_support, threshold);
}

double ece(const std::vector<std::vector<double>>& predictions, const std::vector<int>& labels, int bins) {
  if (predictions.size() != labels.size()) fail(ErrorKind::malformed_input, "predictions and labels differ in length");
  if (bins < 1) fail(ErrorKind::invalid_parameter, "bins must be >= 1");
  if (predictions.empty()) fail(ErrorKind::empty_data, "no predictions");
  std::vector<double> conf(static_cast<std::size_t>(bins), 0.0), acc(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    if (p.empty()) fail(ErrorKind::malformed_input, "empty prediction");
    const auto top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    const double c = p[top];
    // bin b covers (b/B, (b+1)/B]
    auto b = static_cast<long>(std::ceil(c * bins)) - 1;
    b = std::clamp<long>(b, 0, bins - 1);
    conf[static_cast<std::size_t>(b)] += c;
    acc[static_cast<std::size_t>(b)] += static_cast<int>(top) == labels[i] ? 1.0 : 0.0;
    ++count[static_cast<std::size_t>(b)];
  }
  double e = 0.0;
  const auto n = static_cast<double>(predictions.size());
  for (std::size_t b = 0; b < count.size(); ++b) {
    if (count[b] == 0) continue;
    const auto nb = static_cast<double>(count[b]);
    e += (nb / n) * std::abs(acc[b] / nb - conf[b] / nb);
  }
  return e;
}

std::pair<std::vector<std::vector<double>>, std::vector<int>> next_token_predictions(
    const MarkovTextLearner& learner, const Corpus& validation) {
  std::pair<std::vector<std::vector<double>>, std::vector<int>> out;
  for (const auto& s : validation.sequences) {
    std::uint64_t key = learner.start_key();
    for (Token t : s) {
      out.first.push_back(learner.row(key));
      out.second.push_back(t);
      key = learner.push_key(key, t);
    }
  }
  return out;
}

TrajectorySnapshot snapshot_all(const MarkovTextLearner& learner, const TextDataset& data,
                                const Corpus& generated, const MonitorConfig& cfg,
                                const std::vector<std::vector<double>>& z_history, int g) {
  TrajectorySnapshot s;
  s.g = g;
  s.H = anchor_entropy(learner, data.anchors);
  s.z = learner.representation(data.anchors);
  if (g - cfg.window >= 0) {
    auto hist = z_history;
    hist.resize(static_cast<std::size_t>(g));
    hist.push_back(s.z);
    s.S = drift(hist, g, cfg.window, cfg.epsilon);
  }
  s.ppl = perplexity(learner, data.validation);
  s.rare_token_mass = rare_token_mass(generated, data.train_freq, cfg.rare_percentile);
  const auto [preds, labels] = next_token_predictions(learner, data.validation);
  s.ece = ece(preds, labels, cfg.ece_bins);
  return s;
}

TrajectorySnapshot snapshot_all(const SoftmaxClassifierLearner& learner, const FeatureDataset& data,
                                const MonitorConfig& cfg,
                                const std::vector<std::vector<double>>& z_history, int g) {
  TrajectorySnapshot s;
  s.g = g;
  s.H = anchor_entropy(learner, data.anchors);
  s.z = learner.representation(data.anchors);
  if (g - cfg.window >= 0) {
    auto hist = z_history;
    hist.resize(static_cast<std::size_t>(g));
    hist.push_back(s.z);
    s.S = drift(hist, g, cfg.window, cfg.epsilon);
  }
  s.ppl = perplexity(learner, data.validation);
  s.tail_coverage = tail_coverage(learner, data.tail_eval, data.low_support, cfg.tail_threshold);
  std::vector<std::vector<double>> preds;
  std::vector<int> labels;
  for (const auto& ex : data.validation.examples) {
    preds.push_back(learner.predict_dist(ex.features));
    labels.push_back(*ex.label);
  }
  s.ece = ece(preds, labels, cfg.ece_bins);
  return s;
}

}  // namespace collapse
