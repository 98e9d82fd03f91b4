#pragma once

// Umbrella header for the inverse optimal control toolkit.

#include "ioc/continuous.hpp"
#include "ioc/discrete.hpp"
#include "ioc/errors.hpp"
#include "ioc/expression.hpp"
#include "ioc/geometry.hpp"
#include "ioc/report.hpp"
#include "ioc/sampling.hpp"
#include "ioc/synthesis.hpp"
#include "ioc/system.hpp"
#include "ioc/trajectory.hpp"
#include "ioc/verification.hpp"
