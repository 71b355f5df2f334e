#pragma once

// Umbrella header for the library (the command line layer is separate).

#include "shapefit/bandwidth.hpp"
#include "shapefit/bootstrap.hpp"
#include "shapefit/confidence.hpp"
#include "shapefit/config.hpp"
#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/functionals.hpp"
#include "shapefit/gcm.hpp"
#include "shapefit/generators.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/io.hpp"
#include "shapefit/kernel.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/log.hpp"
#include "shapefit/parallel.hpp"
#include "shapefit/parametric.hpp"
#include "shapefit/rng.hpp"
#include "shapefit/sim.hpp"
#include "shapefit/smle.hpp"
#include "shapefit/stats.hpp"
#include "shapefit/step_distribution.hpp"
