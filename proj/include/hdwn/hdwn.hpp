#ifndef HDWN_HDWN_HPP
#define HDWN_HDWN_HPP

// Umbrella header.

#include "hdwn/config.hpp"
#include "hdwn/csv.hpp"
#include "hdwn/dgp.hpp"
#include "hdwn/distributions.hpp"
#include "hdwn/error.hpp"
#include "hdwn/factor.hpp"
#include "hdwn/harness.hpp"
#include "hdwn/linalg.hpp"
#include "hdwn/power_theory.hpp"
#include "hdwn/report.hpp"
#include "hdwn/rng.hpp"
#include "hdwn/series.hpp"
#include "hdwn/statistics.hpp"

#endif  // HDWN_HDWN_HPP
