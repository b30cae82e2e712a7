// Copyright 2026 The PDL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDL_PDL_HPP_
#define PDL_PDL_HPP_

#include "pdl/distances.hpp"
#include "pdl/errors.hpp"
#include "pdl/feature_bank.hpp"
#include "pdl/feature_map.hpp"
#include "pdl/image.hpp"
#include "pdl/loss.hpp"
#include "pdl/metrics.hpp"
#include "pdl/parallel.hpp"
#include "pdl/projections.hpp"
#include "pdl/report.hpp"
#include "pdl/rng.hpp"
#include "pdl/version.hpp"

#endif  // PDL_PDL_HPP_
