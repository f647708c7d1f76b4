#ifndef LISTREC_LISTREC_HPP
#define LISTREC_LISTREC_HPP

// Umbrella header for the whole library.

#include "listrec/baselines.hpp"
#include "listrec/dataset.hpp"
#include "listrec/errors.hpp"
#include "listrec/factors.hpp"
#include "listrec/harness.hpp"
#include "listrec/listwise.hpp"
#include "listrec/metrics.hpp"
#include "listrec/orderstat.hpp"
#include "listrec/rng.hpp"
#include "listrec/util.hpp"

#endif // LISTREC_LISTREC_HPP
