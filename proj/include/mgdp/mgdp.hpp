// Copyright 2026 The mgdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "mgdp/accounting.hpp"
#include "mgdp/errors.hpp"
#include "mgdp/forward.hpp"
#include "mgdp/matrix.hpp"
#include "mgdp/mechanisms.hpp"
#include "mgdp/normal.hpp"
#include "mgdp/random.hpp"
#include "mgdp/root.hpp"
#include "mgdp/sensitivity.hpp"
#include "mgdp/svd.hpp"
