// quadblock.hpp: umbrella header

#pragma once

#include "quadblock/error.hpp"
#include "quadblock/fock.hpp"
#include "quadblock/model.hpp"
#include "quadblock/liouvillian.hpp"
#include "quadblock/propagate.hpp"
#include "quadblock/observables.hpp"
#include "quadblock/convergence.hpp"
#include "quadblock/dressed.hpp"
#include "quadblock/sweep/config.hpp"
#include "quadblock/sweep/presets.hpp"
#include "quadblock/sweep/run.hpp"
#include "quadblock/sweep/csv.hpp"
