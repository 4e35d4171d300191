// Copyright 2026 The lortomo Authors
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

#pragma once

// Everything in one include.

#include "lortomo/analyze.hpp"
#include "lortomo/counts.hpp"
#include "lortomo/errors.hpp"
#include "lortomo/io.hpp"
#include "lortomo/linalg.hpp"
#include "lortomo/lorentz.hpp"
#include "lortomo/loss.hpp"
#include "lortomo/parallel.hpp"
#include "lortomo/protocol.hpp"
#include "lortomo/qstate.hpp"
#include "lortomo/random.hpp"
#include "lortomo/reconstruct.hpp"
#include "lortomo/simulate.hpp"
