#pragma once

// Umbrella header for the two-stage estimation-after-selection toolkit.

#include "psml/bounds.hpp"
#include "psml/core.hpp"
#include "psml/estimators.hpp"
#include "psml/harness/config.hpp"
#include "psml/harness/csv.hpp"
#include "psml/harness/presets.hpp"
#include "psml/harness/runner.hpp"
#include "psml/math/special.hpp"
#include "psml/metrics.hpp"
#include "psml/rng.hpp"
#include "psml/sa_gradient.hpp"
#include "psml/scenarios/bernoulli.hpp"
#include "psml/scenarios/knn.hpp"
#include "psml/scenarios/linear_gaussian.hpp"
#include "psml/scenarios/rules.hpp"
#include "psml/scenarios/spectrum.hpp"
