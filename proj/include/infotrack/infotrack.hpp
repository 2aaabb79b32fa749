#pragma once

#include "infotrack/agent.hpp"
#include "infotrack/angles.hpp"
#include "infotrack/belief.hpp"
#include "infotrack/checkpoint.hpp"
#include "infotrack/config.hpp"
#include "infotrack/env.hpp"
#include "infotrack/episode_log.hpp"
#include "infotrack/errors.hpp"
#include "infotrack/geometry.hpp"
#include "infotrack/metrics.hpp"
#include "infotrack/mlp.hpp"
#include "infotrack/planner.hpp"
#include "infotrack/render.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/rng.hpp"
#include "infotrack/sensor.hpp"
#include "infotrack/target.hpp"
#include "infotrack/train.hpp"
#include "infotrack/version.hpp"
