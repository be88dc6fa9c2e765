#pragma once

#include "rewardlab/orchestrator/condition.hpp"
#include "rewardlab/orchestrator/handcrafted.hpp"
#include "rewardlab/orchestrator/orchestrator.hpp"
#include "rewardlab/orchestrator/plan.hpp"
#include "rewardlab/orchestrator/run_dir.hpp"
#include "rewardlab/orchestrator/run_record.hpp"
