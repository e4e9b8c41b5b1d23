// Copyright 2026 The eqtrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EQTRACK_EQTRACK_HPP_
#define EQTRACK_EQTRACK_HPP_

#include "eqtrack/errors.hpp"
#include "eqtrack/rng.hpp"
#include "eqtrack/game.hpp"
#include "eqtrack/lp.hpp"
#include "eqtrack/equilibrium.hpp"
#include "eqtrack/learners.hpp"
#include "eqtrack/trace.hpp"
#include "eqtrack/oracles.hpp"
#include "eqtrack/welfare.hpp"
#include "eqtrack/io.hpp"
#include "eqtrack/factory.hpp"
#include "eqtrack/sim.hpp"
#include "eqtrack/config.hpp"

#endif  // EQTRACK_EQTRACK_HPP_
