#pragma once

#include "ramsey/closedform.hpp"
#include "ramsey/config.hpp"
#include "ramsey/errors.hpp"
#include "ramsey/experiments.hpp"
#include "ramsey/feller.hpp"
#include "ramsey/grid.hpp"
#include "ramsey/hjb.hpp"
#include "ramsey/model.hpp"
#include "ramsey/policy.hpp"
#include "ramsey/sde.hpp"
