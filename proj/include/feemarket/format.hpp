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
#include <cmath>
#include <cstdio>
#include <string>

namespace feemarket {

/// Fixed-point text for CSV/JSON/SVG output; "inf", "-inf" and "nan" are
/// spelled out so files stay byte-stable across libc implementations.
inline std::string FormatFixed(double value, int precision = 6)
{
  if (std::isnan(value))
  {
    return "nan";
  }
  if (std::isinf(value))
  {
    return value > 0 ? "inf" : "-inf";
  }
  if (value == 0.0)
  {
    value = 0.0;  // drop the sign of -0.0
  }
  char buffer[64];
  int const n = std::snprintf(buffer, sizeof buffer, "%.*f", precision, value);
  if (n < 0 || static_cast<std::size_t>(n) >= sizeof buffer)
  {
    std::string big(static_cast<std::size_t>(std::max(n, 0)) + 1, '\0');
    std::snprintf(big.data(), big.size(), "%.*f", precision, value);
    big.resize(static_cast<std::size_t>(std::max(n, 0)));
    return big;
  }
  return std::string(buffer, static_cast<std::size_t>(n));
}

/// Shortest round-trip-ish rendering for labels.
inline std::string FormatShort(double value)
{
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

}  // namespace feemarket
