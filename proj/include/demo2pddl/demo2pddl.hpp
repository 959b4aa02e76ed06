#pragma once

#include "demo2pddl/core.hpp"
#include "demo2pddl/errors.hpp"
#include "demo2pddl/json_io.hpp"
#include "demo2pddl/learning.hpp"
#include "demo2pddl/monitor.hpp"
#include "demo2pddl/names.hpp"
#include "demo2pddl/pddl.hpp"
#include "demo2pddl/pipeline.hpp"
#include "demo2pddl/planner.hpp"
#include "demo2pddl/segmentation.hpp"
#include "demo2pddl/synth.hpp"
#include "demo2pddl/task.hpp"
#include "demo2pddl/trace.hpp"
