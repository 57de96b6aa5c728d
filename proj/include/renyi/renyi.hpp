#pragma once

#include "renyi/analytic.hpp"
#include "renyi/config.hpp"
#include "renyi/diagnostics.hpp"
#include "renyi/error.hpp"
#include "renyi/experiment.hpp"
#include "renyi/flow.hpp"
#include "renyi/functionals.hpp"
#include "renyi/geometry.hpp"
#include "renyi/inequalities.hpp"
#include "renyi/params.hpp"
