#pragma once

#include "ndsearch/core.hpp"
#include "ndsearch/instances.hpp"
#include "ndsearch/decomposition.hpp"
#include "ndsearch/search.hpp"
#include "ndsearch/lk.hpp"
#include "ndsearch/escape.hpp"
#include "ndsearch/trace.hpp"
#include "ndsearch/metaheuristics.hpp"
#include "ndsearch/landscape.hpp"
#include "ndsearch/stats.hpp"
#include "ndsearch/bench.hpp"
