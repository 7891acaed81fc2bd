#include "collapse/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "collapse/error.hpp"

namespace collapse {

namespace {

void normalize(std::vector<double>& q) {
  const double s = std::accumulate(q.begin(), q.end(), 0.0);
  if (!(s > 0.0) || !std::isfinite(s))
    fail(ErrorKind::numerical_divergence, "distribution has no finite positive mass");
  for (double& x : q) x /= s;
}

}  // namespace

std::vector<double> apply_temperature(const std::vector<double>& p, double temperature) {
  if (!(temperature > 0.0)) fail(ErrorKind::invalid_parameter, "temperature must be positive");
  if (p.empty()) fail(ErrorKind::empty_data, "empty distribution");
  if (temperature == 1.0) {
    std::vector<double> q = p;
    normalize(q);
    return q;
  }
  double lmax = -INFINITY;
  for (double x : p) {
    if (x < 0.0) fail(ErrorKind::malformed_input, "negative probability");
    if (x > 0.0) lmax = std::max(lmax, std::log(x));
  }
  if (lmax == -INFINITY) fail(ErrorKind::malformed_input, "distribution has no mass");
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    q[i] = p[i] > 0.0 ? std::exp((std::log(p[i]) - lmax) / temperature) : 0.0;
  normalize(q);
  return q;
}

std::vector<double> nucleus_filter(const std::vector<double>& p, double top_p) {
  if (!(top_p > 0.0 && top_p <= 1.0)) fail(ErrorKind::invalid_parameter, "top_p must be in (0, 1]");
  std::vector<double> q = p;
  if (top_p >= 1.0) {
    normalize(q);
    return q;
  }
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  double cum = 0.0;
  double cutoff = sorted.back();
  for (double x : sorted) {
    cum += x;
    if (cum >= top_p * total - 1e-12) {
      cutoff = x;
      break;
    }
  }
  for (double& x : q)
    if (x < cutoff) x = 0.0;
  normalize(q);
  return q;
}

std::vector<double> sampling_distribution(const std::vector<double>& p, double top_p,
                                          double temperature) {
  return nucleus_filter(apply_temperature(p, temperature), top_p);
}

std::size_t sample_index(const std::vector<double>& p, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    cum += p[i];
    last_positive = i;
    if (cum > u) return i;
  }
  return last_positive;  // rounding slack when cum ends just below u
}

std::vector<double> sharpen(const std::vector<double>& p, double temperature) {
  return apply_temperature(p, temperature);
}

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double normalization_error(const std::vector<double>& p) {
  return std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
}

}  // namespace collapse
