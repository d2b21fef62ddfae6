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

#include "feemarket/chain.hpp"
#include "feemarket/distributions.hpp"
#include "feemarket/error.hpp"
#include "feemarket/format.hpp"
#include "feemarket/manipulation.hpp"
#include "feemarket/mechanism.hpp"
#include "feemarket/parallel.hpp"
#include "feemarket/replay.hpp"
#include "feemarket/report.hpp"
#include "feemarket/rng.hpp"
#include "feemarket/strategy.hpp"
#include "feemarket/svg.hpp"
#include "feemarket/types.hpp"
