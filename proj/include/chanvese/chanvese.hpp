#pragma once

// Umbrella header for the segmentation library (everything except the CLI).

#include "chanvese/errors.hpp"
#include "chanvese/evolve.hpp"
#include "chanvese/grid.hpp"
#include "chanvese/image_io.hpp"
#include "chanvese/imaging.hpp"
#include "chanvese/metrics.hpp"
#include "chanvese/params.hpp"
#include "chanvese/region.hpp"
#include "chanvese/regularize.hpp"
#include "chanvese/reinit.hpp"
#include "chanvese/segment.hpp"
