#pragma once

#include "synchro/automaton.hpp"
#include "synchro/bibfs_engine.hpp"
#include "synchro/cost_model.hpp"
#include "synchro/dfs_phase.hpp"
#include "synchro/experiment.hpp"
#include "synchro/heuristics.hpp"
#include "synchro/oracle.hpp"
#include "synchro/set_list.hpp"
#include "synchro/state_set.hpp"
#include "synchro/static_trie.hpp"
#include "synchro/subset_algebra.hpp"
#include "synchro/util.hpp"
