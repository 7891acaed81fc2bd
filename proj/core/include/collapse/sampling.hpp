#pragma once

#include <vector>

#include "collapse/rng.hpp"

namespace collapse {

// p_i^(1/T), renormalized. Computed in log space so T -> 0 degrades to the
// (tie-inclusive) argmax indicator instead of underflowing.
std::vector<double> apply_temperature(const std::vector<double>& p, double temperature);

// Smallest prefix of the descending order whose mass reaches top_p; every
// entry tied with the cutoff probability is kept. Result is renormalized.
std::vector<double> nucleus_filter(const std::vector<double>& p, double top_p);

// temperature, then nucleus truncation, then renormalization
std::vector<double> sampling_distribution(const std::vector<double>& p, double top_p,
                                          double temperature);

// p must be normalized.
std::size_t sample_index(const std::vector<double>& p, Rng& rng);

std::vector<double> sharpen(const std::vector<double>& p, double temperature);

double entropy(const std::vector<double>& p);

double normalization_error(const std::vector<double>& p);

}  // namespace collapse
