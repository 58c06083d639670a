#pragma once

#include "ibplane/error.hpp"
#include "ibplane/ib_curve.hpp"
#include "ibplane/ib_solver.hpp"
#include "ibplane/jacobi.hpp"
#include "ibplane/layer_analyzer.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/mlp.hpp"
#include "ibplane/presets.hpp"
#include "ibplane/prob.hpp"
#include "ibplane/sample_bounds.hpp"
