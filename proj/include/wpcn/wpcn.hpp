#pragma once

#include "wpcn/error.hpp"
#include "wpcn/montecarlo.hpp"
#include "wpcn/multi_pb.hpp"
#include "wpcn/planner.hpp"
#include "wpcn/power_control.hpp"
#include "wpcn/rng.hpp"
#include "wpcn/search.hpp"
#include "wpcn/single_pb.hpp"
#include "wpcn/specfun.hpp"
#include "wpcn/types.hpp"
