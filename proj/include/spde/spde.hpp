#pragma once

#include "spde/boundary_layer.hpp"
#include "spde/config.hpp"
#include "spde/diffusion.hpp"
#include "spde/experiments.hpp"
#include "spde/expr.hpp"
#include "spde/grid.hpp"
#include "spde/initial_data.hpp"
#include "spde/kinetics.hpp"
#include "spde/noise.hpp"
#include "spde/report.hpp"
#include "spde/rng.hpp"
#include "spde/stats.hpp"
#include "spde/stepper.hpp"
#include "spde/tridiag.hpp"
#include "spde/version.hpp"
