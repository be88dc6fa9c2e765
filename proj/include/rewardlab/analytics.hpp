#pragma once

#include "rewardlab/analytics/stats.hpp"
#include "rewardlab/analytics/summary.hpp"
#include "rewardlab/analytics/variance.hpp"
