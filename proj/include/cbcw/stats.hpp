#pragma once

#include <span>
#include <vector>

namespace cbcw {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile; argument must lie in (0,1).
double normal_quantile(double p);

// Two-sided normal tail probability 2*(1 - Phi(|z|)). NaN propagates.
double two_sided_p(double z);

double mean(std::span<const double> values);

// Sample standard deviation (n-1 denominator); requires at least 2 values.
double sample_sd(std::span<const double> values);

// Linear-interpolation quantile (R type 7) of an already sorted vector.
double quantile_sorted(std::span<const double> sorted, double prob);

}  // namespace cbcw
