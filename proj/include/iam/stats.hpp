#pragma once

#include <span>
#include <vector>

namespace iam {

double mean(std::span<const double> xs);
// Denominator n - 1; zero for fewer than two values.
double sample_variance(std::span<const double> xs);
// Denominator n; zero for an empty span.
double population_variance(std::span<const double> xs);

// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);

// Linear-interpolation quantile of already sorted data (R type 7).
double sorted_quantile(std::span<const double> sorted, double q);

}  // namespace iam
