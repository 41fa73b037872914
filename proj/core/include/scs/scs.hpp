// Copyright 2026 The SCS Authors
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

// Umbrella header for the scs core library.

#pragma once

#include "scs/agent.hpp"
#include "scs/analysis.hpp"
#include "scs/clustering.hpp"
#include "scs/error.hpp"
#include "scs/features.hpp"
#include "scs/metrics.hpp"
#include "scs/oracle.hpp"
#include "scs/pool.hpp"
#include "scs/remote_oracle.hpp"
#include "scs/rng.hpp"
#include "scs/training.hpp"
