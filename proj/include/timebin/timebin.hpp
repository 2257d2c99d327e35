// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "timebin/analytic.hpp"
#include "timebin/core_model.hpp"
#include "timebin/errors.hpp"
#include "timebin/philox.hpp"
#include "timebin/run_config.hpp"
#include "timebin/stochastic_oracle.hpp"
#include "timebin/sweeps.hpp"
#include "timebin/version.hpp"
