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

#include <cstdint>
#include <limits>
#include <random>

namespace feemarket {

constexpr std::uint64_t SplitMix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

/// Engine plus the handful of draws the library needs. Only bit-exact
/// transforms are used (no std:: distributions), so a given seed yields the
/// same numbers on every conforming platform.
class RandomStream
{
public:
  explicit RandomStream(std::uint64_t seed)
    : engine_{seed}
  {}

  std::uint64_t NextU64()
  {
    return engine_();
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double Uniform01()
  {
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
  }

  /// Uniform on (0, 1], safe as a log argument.
  double UniformOpen0()
  {
    return 1.0 - Uniform01();
  }

  bool Bernoulli(double p)
  {
    return Uniform01() < p;
  }

  /// Uniform integer on [0, n) by rejection, n > 0.
  std::uint64_t Below(std::uint64_t n)
  {
    std::uint64_t const limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit)
    {
      x = engine_();
    }
    return x % n;
  }

private:
  std::mt19937_64 engine_;
};

/// A (master seed, stream index) pair naming one independent random stream.
/// Monte-Carlo code hands trial t the substream t, so results never depend on
/// how trials are scheduled across threads.
struct SeededRng
{
  std::uint64_t master_seed{0};
  std::uint64_t stream_index{0};

  SeededRng Substream(std::uint64_t index) const noexcept
  {
    return {master_seed, SplitMix64(stream_index ^ SplitMix64(index + 0x632be59bd9b4e019ULL))};
  }

  RandomStream Open() const
  {
    return RandomStream{SplitMix64(master_seed ^ SplitMix64(stream_index))};
  }
};

}  // namespace feemarket
