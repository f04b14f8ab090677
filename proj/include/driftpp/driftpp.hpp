#pragma once

// Umbrella header for the driftpp library.

#include "driftpp/adaptive.hpp"
#include "driftpp/core.hpp"
#include "driftpp/data.hpp"
#include "driftpp/error.hpp"
#include "driftpp/io.hpp"
#include "driftpp/knn.hpp"
#include "driftpp/learnpp.hpp"
#include "driftpp/metrics.hpp"
#include "driftpp/reduce.hpp"
