#pragma once

#include "rewardlab/generator/client.hpp"
#include "rewardlab/generator/generate.hpp"
#include "rewardlab/generator/prompts.hpp"
#include "rewardlab/generator/scenarios.hpp"
