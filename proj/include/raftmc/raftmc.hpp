#pragma once

#include "raftmc/config.hpp"
#include "raftmc/encoding.hpp"
#include "raftmc/environment.hpp"
#include "raftmc/explore.hpp"
#include "raftmc/log.hpp"
#include "raftmc/node.hpp"
#include "raftmc/properties.hpp"
#include "raftmc/render.hpp"
#include "raftmc/report.hpp"
#include "raftmc/rpc.hpp"
#include "raftmc/state.hpp"
#include "raftmc/successors.hpp"
#include "raftmc/transitions.hpp"
