#pragma once

#include "weierdim/types.hpp"
#include "weierdim/rng.hpp"
#include "weierdim/parallel.hpp"
#include "weierdim/phase.hpp"
#include "weierdim/series.hpp"
#include "weierdim/star.hpp"
#include "weierdim/thresholds.hpp"
#include "weierdim/transversality.hpp"
#include "weierdim/measures.hpp"
#include "weierdim/dimension.hpp"
