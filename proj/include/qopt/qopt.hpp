#pragma once

#include "qopt/assumptions.hpp"
#include "qopt/bound_model.hpp"
#include "qopt/ehrhart.hpp"
#include "qopt/estimates.hpp"
#include "qopt/index_sets.hpp"
#include "qopt/min_cardinality.hpp"
#include "qopt/model_json.hpp"
#include "qopt/polytope.hpp"
#include "qopt/presets.hpp"
#include "qopt/tails.hpp"
