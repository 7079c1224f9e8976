#pragma once

// Umbrella header for the 5-DoF RRPRR arm kinematics toolkit.

#include "armkin/eval.hpp"
#include "armkin/fk.hpp"
#include "armkin/geometry.hpp"
#include "armkin/ik.hpp"
#include "armkin/io.hpp"
#include "armkin/metrics.hpp"
#include "armkin/model.hpp"
#include "armkin/refine.hpp"
#include "armkin/sampling.hpp"
