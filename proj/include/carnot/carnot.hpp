#pragma once

#include "carnot/algebra.hpp"
#include "carnot/curves.hpp"
#include "carnot/errors.hpp"
#include "carnot/fixtures.hpp"
#include "carnot/frames.hpp"
#include "carnot/group.hpp"
#include "carnot/group_law.hpp"
#include "carnot/intervals.hpp"
#include "carnot/measure.hpp"
#include "carnot/metric.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/rational.hpp"
#include "carnot/types.hpp"

namespace carnot {
inline constexpr const char* kVersion = "0.1.0";
}
