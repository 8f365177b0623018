#pragma once

#include <span>
#include <vector>

namespace driveml::stats {

/// Type-7 quantile (linear interpolation at position 1 + (n-1)p) of
/// already-sorted data. Requires non-empty input and p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Type-7 quantile of unsorted data (copies and sorts).
double quantile(std::span<const double> values, double p);

double median(std::span<const double> values);
double mean(std::span<const double> values);

/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sd(std::span<const double> values);

/// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace driveml::stats
