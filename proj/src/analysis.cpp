#include "wfsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wfsim/errors.hpp"

namespace wfsim {

FitResult fit_linear(std::span<const Sample> points) {
  const auto n = static_cast<double>(points.size());
  std::set<double> sizes;
  for (const auto& p : points) sizes.insert(p.size_mb);
  if (sizes.size() < 2) throw DegenerateFitError("fit needs at least two distinct sizes");

  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.size_mb;
    my += p.duration_s;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    double dx = p.size_mb - mx, dy = p.duration_s - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  FitResult fit;
  fit.alpha = sxy / sxx;
  fit.beta = my - fit.alpha * mx;
  double ss_res = 0.0;
  fit.residuals.reserve(points.size());
  for (const auto& p : points) {
    double r = p.duration_s - (fit.alpha * p.size_mb + fit.beta);
    fit.residuals.push_back(r);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  if (points.size() > 2) {
    double s2 = ss_res / (n - 2.0);
    fit.alpha_stderr = std::sqrt(s2 / sxx);
    fit.beta_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return fit;
}

BinRange select_bins(std::span<const SizeBin> bins, const BinSelection& rule) {
  std::size_t total = 0;
  for (const auto& b : bins) total += b.values.size();
  if (bins.empty() || total == 0) return {};
  const double per_bin = rule.min_bin_fraction.value_or(1.0 / static_cast<double>(bins.size()));
  auto frac = [&](int k) {
    return static_cast<double>(bins[static_cast<std::size_t>(k)].values.size()) / static_cast<double>(total);
  };

  int first = 0, last = static_cast<int>(bins.size()) - 1;
  double trimmed = 0.0;
  while (first <= last && frac(first) < per_bin && trimmed + frac(first) < rule.tail_mass) {
    trimmed += frac(first);
    ++first;
  }
  trimmed = 0.0;
  while (last >= first && frac(last) < per_bin && trimmed + frac(last) < rule.tail_mass) {
    trimmed += frac(last);
    --last;
  }
  // Empty bins at the ends are never representative.
  while (first <= last && bins[static_cast<std::size_t>(first)].values.empty()) ++first;
  while (last >= first && bins[static_cast<std::size_t>(last)].values.empty()) --last;
  return {first, last};
}

FitResult fit_bins(std::span<const SizeBin> bins, BinRange range, bool bin_means) {
  std::vector<Sample> points;
  for (int k = range.first; k <= range.last; ++k) {
    const auto& values = bins[static_cast<std::size_t>(k)].values;
    if (values.empty()) continue;
    if (bin_means) {
      Sample mean;
      for (const auto& v : values) {
        mean.size_mb += v.size_mb;
        mean.duration_s += v.duration_s;
      }
      mean.size_mb /= static_cast<double>(values.size());
      mean.duration_s /= static_cast<double>(values.size());
      points.push_back(mean);
    } else {
      points.insert(points.end(), values.begin(), values.end());
    }
  }
  FitResult fit = fit_linear(points);
  fit.bins_used = range;
  return fit;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ConfigError("quantile of empty sample");
  double h = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw ConfigError("box_stats of empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxStats s;
  s.q1 = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.q3 = quantile_sorted(v, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.q1;
  s.whisker_hi = s.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      s.outliers.push_back(x);
    } else {
      s.whisker_lo = std::min(s.whisker_lo, x);
      s.whisker_hi = std::max(s.whisker_hi, x);
    }
  }
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

nlohmann::json fit_row(const std::string& design, const std::string& task, const FitResult& fit) {
  nlohmann::json j = {{"design", design},
                      {"task", task},
                      {"alpha", fit.alpha},
                      {"beta", fit.beta},
                      {"r_squared", fit.r_squared},
                      {"alpha_stderr", fit.alpha_stderr},
                      {"beta_stderr", fit.beta_stderr},
                      {"n_points", fit.residuals.size()}};
  if (fit.bins_used) j["bins_used"] = {fit.bins_used->first, fit.bins_used->last};
  return j;
}

}  // namespace wfsim
