// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "symprune/calibration.hpp"
#include "symprune/dsnot.hpp"
#include "symprune/errors.hpp"
#include "symprune/io.hpp"
#include "symprune/masking.hpp"
#include "symprune/matrix.hpp"
#include "symprune/random.hpp"
#include "symprune/reconstruction.hpp"
#include "symprune/scores.hpp"
#include "symprune/verification.hpp"
