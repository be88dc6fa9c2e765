#pragma once

#include "rewardlab/ppo/adam.hpp"
#include "rewardlab/ppo/config.hpp"
#include "rewardlab/ppo/gae.hpp"
#include "rewardlab/ppo/mlp.hpp"
#include "rewardlab/ppo/normalizer.hpp"
#include "rewardlab/ppo/policy.hpp"
#include "rewardlab/ppo/rnd.hpp"
#include "rewardlab/ppo/run_log.hpp"
#include "rewardlab/ppo/trainer.hpp"
