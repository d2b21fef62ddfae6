//------------------------------------------------------------------------------
//
//   Copyright 2026 The feemarket Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "feemarket/error.hpp"
#include "feemarket/parallel.hpp"
#include "feemarket/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace feemarket {

/// Value / bid distribution. Values are continuous here; quantization to
/// FeeAmount happens at the mechanism boundary.
///
/// Exponential and power-law (Pareto type I) supports are unbounded. They can
/// be truncated at an upper bound with Truncated(); by default they are not.
class ValueDistribution
{
public:
  enum class Kind
  {
    kUniform,
    kExponential,
    kPowerLaw,
    kEmpirical,
  };

  static ValueDistribution Uniform(double lo, double hi)
  {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
    {
      throw Error(ErrorCode::kParameter, "uniform needs 0 <= lo < hi < inf");
    }
    ValueDistribution d{Kind::kUniform};
    d.a_ = lo;
    d.b_ = hi;
    return d;
  }

  static ValueDistribution Exponential(double rate)
  {
    if (!(rate > 0.0) || !std::isfinite(rate))
    {
      throw Error(ErrorCode::kParameter, "exponential rate must be positive");
    }
    ValueDistribution d{Kind::kExponential};
    d.a_ = rate;
    return d;
  }

  /// Pareto type I: density alpha x_m^alpha / x^(alpha+1) on [x_m, inf).
  /// alpha must exceed 1 so the mean exists.
  static ValueDistribution PowerLaw(double alpha, double scale)
  {
    if (!(alpha > 1.0) || !std::isfinite(alpha))
    {
      throw Error(ErrorCode::kParameter, "power-law shape must exceed 1");
    }
    if (!(scale > 0.0) || !std::isfinite(scale))
    {
      throw Error(ErrorCode::kParameter, "power-law scale must be positive");
    }
    ValueDistribution d{Kind::kPowerLaw};
    d.a_ = alpha;
    d.b_ = scale;
    return d;
  }

  /// Resamples uniformly from an observed sample.
  static ValueDistribution Empirical(std::vector<double> sample)
  {
    if (sample.empty())
    {
      throw Error(ErrorCode::kParameter, "empirical distribution needs data");
    }
    for (double x : sample)
    {
      if (!(x >= 0.0) || !std::isfinite(x))
      {
        throw Error(ErrorCode::kParameter, "empirical values must be finite and non-negative");
      }
    }
    std::sort(sample.begin(), sample.end());
    ValueDistribution d{Kind::kEmpirical};
    d.sample_ = std::move(sample);
    return d;
  }

  /// Copy restricted to [.., upper]; sampling uses the conditional law.
  ValueDistribution Truncated(double upper) const
  {
    if (!(upper > LowerBound()))
    {
      throw Error(ErrorCode::kParameter, "truncation point below the support");
    }
    ValueDistribution d = *this;
    d.upper_            = std::min(upper, UntruncatedUpper());
    return d;
  }

  Kind kind() const noexcept
  {
    return kind_;
  }
  double lo() const noexcept
  {
    return a_;
  }
  double hi() const noexcept
  {
    return b_;
  }
  double rate() const noexcept
  {
    return a_;
  }
  double alpha() const noexcept
  {
    return a_;
  }
  double scale() const noexcept
  {
    return b_;
  }
  std::vector<double> const &empirical_sample() const noexcept
  {
    return sample_;
  }

  bool IsTruncated() const noexcept
  {
    return upper_ < UntruncatedUpper();
  }

  /// False for exponential and power law unless truncated.
  bool HasBoundedSupport() const noexcept
  {
    return std::isfinite(SupportUpper());
  }

  double SupportUpper() const noexcept
  {
    return std::min(upper_, UntruncatedUpper());
  }

  double Cdf(double x) const
  {
    double const top = BaseCdf(SupportUpper());
    return std::clamp(BaseCdf(std::min(x, SupportUpper())) / top, 0.0, 1.0);
  }

  double Quantile(double u) const
  {
    u = std::clamp(u, 0.0, 1.0);
    if (IsTruncated())
    {
      u *= BaseCdf(upper_);
    }
    return BaseQuantile(u);
  }

  double Median() const
  {
    if (kind_ == Kind::kEmpirical && !IsTruncated())
    {
      std::size_t const n = sample_.size();
      return n % 2 == 1 ? sample_[n / 2] : 0.5 * (sample_[n / 2 - 1] + sample_[n / 2]);
    }
    return Quantile(0.5);
  }

  double Mean() const
  {
    switch (kind_)
    {
    case Kind::kUniform:
    {
      double const top = SupportUpper();
      return 0.5 * (a_ + top);
    }
    case Kind::kExponential:
    {
      if (!IsTruncated())
      {
        return 1.0 / a_;
      }
      double const t = upper_;
      double const e = std::exp(-a_ * t);
      return 1.0 / a_ - t * e / (1.0 - e);
    }
    case Kind::kPowerLaw:
    {
      if (!IsTruncated())
      {
        return a_ * b_ / (a_ - 1.0);
      }
      double const t = upper_;
      double const num =
          a_ * std::pow(b_, a_) * (std::pow(t, 1.0 - a_) - std::pow(b_, 1.0 - a_)) / (1.0 - a_);
      return num / BaseCdf(t);
    }
    case Kind::kEmpirical:
    {
      double sum = 0.0;
      std::size_t n = 0;
      for (double x : sample_)
      {
        if (x <= upper_)
        {
          sum += x;
          ++n;
        }
      }
      return sum / static_cast<double>(n);
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double Draw(RandomStream &rng) const
  {
    switch (kind_)
    {
    case Kind::kUniform:
      return a_ + (SupportUpper() - a_) * rng.Uniform01();
    case Kind::kExponential:
    case Kind::kPowerLaw:
      if (IsTruncated())
      {
        return Quantile(rng.Uniform01());
      }
      // inverse transform on (0, 1] keeps both logs and powers finite
      return kind_ == Kind::kExponential ? -std::log(rng.UniformOpen0()) / a_
                                         : b_ * std::pow(rng.UniformOpen0(), -1.0 / a_);
    case Kind::kEmpirical:
      return Quantile(rng.Uniform01());
    }
    return 0.0;
  }

  std::string Describe() const
  {
    std::string out;
    switch (kind_)
    {
    case Kind::kUniform:
      out = "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      break;
    case Kind::kExponential:
      out = "exponential(" + std::to_string(a_) + ")";
      break;
    case Kind::kPowerLaw:
      out = "pareto(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      break;
    case Kind::kEmpirical:
      out = "empirical(" + std::to_string(sample_.size()) + ")";
      break;
    }
    if (IsTruncated())
    {
      out += "<=" + std::to_string(upper_);
    }
    return out;
  }

private:
  explicit ValueDistribution(Kind kind)
    : kind_{kind}
  {}

  double LowerBound() const noexcept
  {
    switch (kind_)
    {
    case Kind::kUniform:
      return a_;
    case Kind::kPowerLaw:
      return b_;
    case Kind::kEmpirical:
      return sample_.front();
    case Kind::kExponential:
      break;
    }
    return 0.0;
  }

  double UntruncatedUpper() const noexcept
  {
    switch (kind_)
    {
    case Kind::kUniform:
      return b_;
    case Kind::kEmpirical:
      return sample_.back();
    default:
      return std::numeric_limits<double>::infinity();
    }
  }

  double BaseCdf(double x) const
  {
    switch (kind_)
    {
    case Kind::kUniform:
      return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    case Kind::kExponential:
      return x <= 0.0 ? 0.0 : (std::isinf(x) ? 1.0 : -std::expm1(-a_ * x));
    case Kind::kPowerLaw:
      return x <= b_ ? 0.0 : (std::isinf(x) ? 1.0 : 1.0 - std::pow(b_ / x, a_));
    case Kind::kEmpirical:
    {
      auto const it = std::upper_bound(sample_.begin(), sample_.end(), x);
      return static_cast<double>(it - sample_.begin()) / static_cast<double>(sample_.size());
    }
    }
    return 0.0;
  }

  double BaseQuantile(double u) const
  {
    switch (kind_)
    {
    case Kind::kUniform:
      return a_ + (b_ - a_) * u;
    case Kind::kExponential:
      return -std::log1p(-u) / a_;
    case Kind::kPowerLaw:
      return b_ * std::pow(1.0 - u, -1.0 / a_);
    case Kind::kEmpirical:
    {
      auto const n   = sample_.size();
      auto const idx = std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
      return sample_[idx];
    }
    }
    return 0.0;
  }

  Kind                kind_;
  double              a_{0.0};
  double              b_{0.0};
  double              upper_{std::numeric_limits<double>::infinity()};
  std::vector<double> sample_;
};

/// n iid draws from one stream.
inline std::vector<double> Sample(ValueDistribution const &dist, std::size_t n, SeededRng rng)
{
  std::vector<double> out;
  out.reserve(n);
  auto stream = rng.Open();
  for (std::size_t i = 0; i < n; ++i)
  {
    out.push_back(dist.Draw(stream));
  }
  return out;
}

/// mean / median of a Pareto type I with shape alpha.
inline double ParetoMeanToMedian(double alpha)
{
  return alpha / (alpha - 1.0) * std::pow(2.0, -1.0 / alpha);
}

/// Pareto type I with the requested median and mean, shape searched on
/// (1, 10]. The mean/median ratio is strictly decreasing in the shape, so
/// bisection on the bracket converges to the unique root.
inline ValueDistribution FitPowerLaw(double median, double mean)
{
  constexpr double kMaxShape = 10.0;
  if (!(median > 0.0) || !(mean > median) || !std::isfinite(mean))
  {
    throw Error(ErrorCode::kFit, "need 0 < median < mean");
  }
  double const target = mean / median;
  if (target <= ParetoMeanToMedian(kMaxShape))
  {
    throw Error(ErrorCode::kFit, "mean/median ratio not reachable with shape in (1, 10]");
  }

  double lo = 1.0;
  double hi = kMaxShape;
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter)
  {
    double const mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi)
    {
      break;
    }
    if (ParetoMeanToMedian(mid) > target)
    {
      lo = mid;
    }
    else
    {
      hi = mid;
    }
  }
  double const alpha = 0.5 * (lo + hi);
  double const scale = median / std::pow(2.0, 1.0 / alpha);
  auto         dist  = ValueDistribution::PowerLaw(alpha, scale);

  double const median_err = std::abs(dist.Median() - median) / median;
  double const mean_err   = std::abs(dist.Mean() - mean) / mean;
  if (median_err > 1e-9 || mean_err > 1e-9)
  {
    throw Error(ErrorCode::kFit, "power-law fit did not converge");
  }
  return dist;
}

/// Monte-Carlo estimate of E[V(K-1) - V(K)], the gap between the (K-1)-th and
/// K-th highest of A iid draws. Trial t uses rng.Substream(t).
inline MeanEstimate OrderStatGapMc(ValueDistribution const &dist, std::size_t users,
                                   std::size_t k, std::size_t trials, SeededRng rng,
                                   unsigned threads = 1)
{
  if (k < 2 || users <= k)
  {
    throw Error(ErrorCode::kDomain, "need A > K >= 2");
  }
  if (trials == 0)
  {
    throw Error(ErrorCode::kDomain, "need at least one trial");
  }
  auto const gaps = ParallelMap(trials, threads, [&](std::size_t t) {
    auto values = Sample(dist, users, rng.Substream(t));
    std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k),
                      values.end(), std::greater<>{});
    return values[k - 2] - values[k - 1];
  });
  return EstimateMean(gaps);
}

/// Adjacent spacing of uniform order statistics: (hi - lo) / (A + 1).
inline double UniformGapExact(double lo, double hi, std::size_t users)
{
  return (hi - lo) / static_cast<double>(users + 1);
}

/// Exponential spacings: the gap between the j-th and (j+1)-th highest of
/// A draws is Exp(rate * j), so E[V(K-1) - V(K)] = 1 / (rate (K - 1)).
inline double ExponentialGapSpacings(double rate, std::size_t k)
{
  return 1.0 / (rate * static_cast<double>(k - 1));
}

/// The alternative closed form 1 / (rate (A - K + 1)), reported for comparison.
inline double ExponentialGapAlternative(double rate, std::size_t users, std::size_t k)
{
  return 1.0 / (rate * static_cast<double>(users - k + 1));
}

struct GapComparison
{
  MeanEstimate estimate;
  double       spacings{0.0};
  double       alternative{0.0};
  bool         matches_spacings{false};
  bool         matches_alternative{false};
};

/// Flags which exponential closed form the Monte-Carlo estimate agrees with
/// (within `z` standard errors).
inline GapComparison CompareExponentialGap(MeanEstimate estimate, double rate, std::size_t users,
                                           std::size_t k, double z = 3.0)
{
  GapComparison out;
  out.estimate            = estimate;
  out.spacings            = ExponentialGapSpacings(rate, k);
  out.alternative         = ExponentialGapAlternative(rate, users, k);
  out.matches_spacings    = std::abs(estimate.mean - out.spacings) <= z * estimate.std_error;
  out.matches_alternative = std::abs(estimate.mean - out.alternative) <= z * estimate.std_error;
  return out;
}

}  // namespace feemarket
