#pragma once

#include "egonet/analytics.hpp"
#include "egonet/clustering.hpp"
#include "egonet/core_model.hpp"
#include "egonet/csv.hpp"
#include "egonet/egonet_dynamic.hpp"
#include "egonet/egonet_static.hpp"
#include "egonet/ingestion.hpp"
#include "egonet/labeling.hpp"
#include "egonet/pipeline.hpp"
#include "egonet/preprocessing.hpp"
#include "egonet/random.hpp"
#include "egonet/stats.hpp"
#include "egonet/svg.hpp"
#include "egonet/synth.hpp"
#include "egonet/time.hpp"
