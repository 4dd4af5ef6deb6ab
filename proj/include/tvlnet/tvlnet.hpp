#pragma once

// Umbrella header: TVL records -> temporal credit-exposure graphs -> network
// analyses (global metrics and clustering, sector shock dynamics, dynamic
// link prediction).

#include "tvlnet/align.hpp"
#include "tvlnet/categories.hpp"
#include "tvlnet/config.hpp"
#include "tvlnet/csv.hpp"
#include "tvlnet/dbscan.hpp"
#include "tvlnet/decimal.hpp"
#include "tvlnet/features.hpp"
#include "tvlnet/graphview.hpp"
#include "tvlnet/jval.hpp"
#include "tvlnet/metrics.hpp"
#include "tvlnet/netbuild.hpp"
#include "tvlnet/pipeline.hpp"
#include "tvlnet/record.hpp"
#include "tvlnet/ricci.hpp"
#include "tvlnet/sectors.hpp"
#include "tvlnet/snapshot.hpp"
#include "tvlnet/synth.hpp"
#include "tvlnet/tgnn.hpp"
#include "tvlnet/tokmap.hpp"
#include "tvlnet/tsne.hpp"
#include "tvlnet/util.hpp"
#include "tvlnet/var.hpp"
