#pragma once

// Canopy PAR interception simulator: procedural or scanned maize plants are
// replicated into a periodic virtual field, and reverse ray tracing computes
// per-surface photosynthetically active radiation through the day and season.

#include "canopar/bvh.hpp"
#include "canopar/config.hpp"
#include "canopar/csv.hpp"
#include "canopar/field.hpp"
#include "canopar/geometry.hpp"
#include "canopar/parallel.hpp"
#include "canopar/plantgen.hpp"
#include "canopar/ply.hpp"
#include "canopar/radiation.hpp"
#include "canopar/reports.hpp"
#include "canopar/rng.hpp"
#include "canopar/simdriver.hpp"
#include "canopar/solar.hpp"
#include "canopar/validate.hpp"
#include "canopar/vec3.hpp"
