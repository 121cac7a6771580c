#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfsim/workload.hpp"

namespace wfsim {

/// Inclusive bin index range; `empty()` when no bin qualifies.
struct BinRange {
  int first = 0;
  int last = -1;
  bool empty() const { return last < first; }
  int size() const { return empty() ? 0 : last - first + 1; }
};

struct FitResult {
  double alpha = 0.0;
  double beta = 0.0;
  double r_squared = 0.0;
  double alpha_stderr = 0.0;
  double beta_stderr = 0.0;
  std::vector<double> residuals;
  std::optional<BinRange> bins_used;
};

/// Ordinary least squares for duration = alpha * size + beta. R^2 is defined
/// as 0 when every duration is identical. Throws DegenerateFitError for fewer
/// than two distinct sizes.
FitResult fit_linear(std::span<const Sample> points);

/// Trimming rule for unrepresentative head and tail bins. From each end a bin
/// is dropped while it holds less than `min_bin_fraction` of all values and
/// the mass trimmed on that side stays below `tail_mass`. When
/// `min_bin_fraction` is unset it defaults to 1 / number of bins, i.e. the
/// occupancy of a perfectly uniform histogram.
struct BinSelection {
  double tail_mass = 0.05;
  std::optional<double> min_bin_fraction;
};

BinRange select_bins(std::span<const SizeBin> bins, const BinSelection& rule = {});

/// Fit over the bins in `range`: raw points, or one (mean size, mean
/// duration) point per non-empty bin when `bin_means` is set.
FitResult fit_bins(std::span<const SizeBin> bins, BinRange range, bool bin_means = false);

/// Tukey box-plot summary: linear-interpolation quartiles, whiskers at the
/// most extreme values within 1.5 IQR of the box, everything beyond is an
/// outlier. `std` is the sample standard deviation.
struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;
  double mean = 0.0;
  double std = 0.0;
};

/// Throws ConfigError on empty input.
BoxStats box_stats(std::span<const double> values);

/// Percentile by linear interpolation between closest ranks, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// One row of the fitted-parameter table.
nlohmann::json fit_row(const std::string& design, const std::string& task, const FitResult& fit);

}  // namespace wfsim
