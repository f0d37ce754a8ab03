#pragma once

// Umbrella header: supervised nonlinear mapping of labeled dissimilarity
// data into 2-D, with quality metrics, file formats, and the CLI entry point.

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"
#include "classimap/weighting.hpp"
#include "classimap/stress.hpp"
#include "classimap/optimizer.hpp"
#include "classimap/metrics.hpp"
#include "classimap/io.hpp"
#include "classimap/cli.hpp"
