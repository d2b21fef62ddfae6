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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace feemarket {

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and returns
/// the results in index order. threads == 0 means hardware concurrency.
/// Output is independent of the worker count as long as fn(i) is a pure
/// function of i.
template <typename Fn>
auto ParallelMap(std::size_t count, unsigned threads, Fn &&fn)
    -> std::vector<std::invoke_result_t<Fn &, std::size_t>>
{
  using Result = std::invoke_result_t<Fn &, std::size_t>;
  std::vector<Result> results(count);

  if (threads == 0)
  {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  auto const workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      results[i] = fn(i);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr       failure;
  std::mutex               failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
    {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        {
          try
          {
            results[i] = fn(i);
          }
          catch (...)
          {
            std::lock_guard lock{failure_mutex};
            if (!failure)
            {
              failure = std::current_exception();
            }
            next = count;
          }
        }
      });
    }
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
  return results;
}

/// Mean and standard error of the mean, reduced in index order.
struct MeanEstimate
{
  double mean{0.0};
  double std_error{0.0};
};

template <typename Range>
MeanEstimate EstimateMean(Range const &samples)
{
  std::size_t n = 0;
  double      sum = 0.0;
  for (double x : samples)
  {
    sum += x;
    ++n;
  }
  if (n == 0)
  {
    return {};
  }
  double const mean = sum / static_cast<double>(n);
  double       ss   = 0.0;
  for (double x : samples)
  {
    ss += (x - mean) * (x - mean);
  }
  double const var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace feemarket
