#pragma once

#include "rewardlab/dsl/ast.hpp"
#include "rewardlab/dsl/interpreter.hpp"
#include "rewardlab/dsl/lint.hpp"
#include "rewardlab/dsl/parser.hpp"
#include "rewardlab/dsl/potential.hpp"
#include "rewardlab/dsl/printer.hpp"
#include "rewardlab/dsl/validate.hpp"
