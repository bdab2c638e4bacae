// Umbrella header for the privacy-trading market toolkit.
#pragma once

#include "privmarket/cost.hpp"
#include "privmarket/dynamics.hpp"
#include "privmarket/efficiency.hpp"
#include "privmarket/equilibrium.hpp"
#include "privmarket/errors.hpp"
#include "privmarket/numeric.hpp"
#include "privmarket/scenario.hpp"
#include "privmarket/scenario_io.hpp"
