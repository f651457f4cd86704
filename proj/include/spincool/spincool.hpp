#pragma once

#include "spincool/core.hpp"
#include "spincool/rational.hpp"
#include "spincool/gates.hpp"
#include "spincool/leading_order.hpp"
#include "spincool/engines.hpp"
#include "spincool/algorithms.hpp"
#include "spincool/analysis.hpp"
#include "spincool/runner.hpp"
#include "spincool/io.hpp"
