// Copyright 2026 The posshare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "posshare/area.hpp"
#include "posshare/csps.hpp"
#include "posshare/error.hpp"
#include "posshare/geometry.hpp"
#include "posshare/io.hpp"
#include "posshare/map_grid.hpp"
#include "posshare/osps.hpp"
#include "posshare/placement.hpp"
#include "posshare/privacy.hpp"
#include "posshare/random.hpp"
#include "posshare/shares.hpp"
#include "posshare/sim.hpp"
#include "posshare/trajectory.hpp"
#include "posshare/update.hpp"
