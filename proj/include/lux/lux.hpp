// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Umbrella header: scene model, photometry, transport, solver, perception,
// dimming optimization, DALI simulation, and the scenario driver.

#include "lux/albedo.hpp"
#include "lux/bvh.hpp"
#include "lux/common.hpp"
#include "lux/controller.hpp"
#include "lux/dali.hpp"
#include "lux/depth.hpp"
#include "lux/form_factor.hpp"
#include "lux/gateway.hpp"
#include "lux/geometry.hpp"
#include "lux/mapping.hpp"
#include "lux/perception.hpp"
#include "lux/photometry.hpp"
#include "lux/radiosity.hpp"
#include "lux/scenario.hpp"
#include "lux/scene.hpp"
