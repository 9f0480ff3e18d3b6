#pragma once

#include "baseline.hpp"
#include "common.hpp"
#include "det.hpp"
#include "format.hpp"
#include "harness.hpp"
#include "lz78.hpp"
#include "rand.hpp"
#include "spanner.hpp"
#include "trace.hpp"
