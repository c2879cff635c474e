#pragma once

// Convenience header pulling in the whole library.

#include "startrail/block.hpp"
#include "startrail/blockstore.hpp"
#include "startrail/config.hpp"
#include "startrail/csv.hpp"
#include "startrail/hash.hpp"
#include "startrail/ids.hpp"
#include "startrail/messages.hpp"
#include "startrail/metrics.hpp"
#include "startrail/node.hpp"
#include "startrail/popularity.hpp"
#include "startrail/rng.hpp"
#include "startrail/routing.hpp"
#include "startrail/scenario.hpp"
#include "startrail/sim.hpp"
#include "startrail/startrail_core.hpp"
#include "startrail/workloads.hpp"
