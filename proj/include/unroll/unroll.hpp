#pragma once

#include "unroll/compose.hpp"
#include "unroll/config.hpp"
#include "unroll/estimate.hpp"
#include "unroll/features.hpp"
#include "unroll/harness.hpp"
#include "unroll/image.hpp"
#include "unroll/image_io.hpp"
#include "unroll/matching.hpp"
#include "unroll/metrics.hpp"
#include "unroll/preprocess.hpp"
#include "unroll/report.hpp"
#include "unroll/synth.hpp"
#include "unroll/transform.hpp"
#include "unroll/warp.hpp"
