#pragma once

#include <vector>

namespace collapse {

double mean(const std::vector<double>& v);
// Sample standard deviation (n - 1); 0 for a single value.
double sample_std(const std::vector<double>& v);
// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> v, double q);
double median(const std::vector<double>& v);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
Quartiles quartiles(const std::vector<double>& v);

}  // namespace collapse
