#pragma once

#include "autotune/space.hpp"

namespace autotune {

/// A configuration paired with one measured runtime (ms); model training input.
struct Observation {
  Configuration config;
  double runtime = 0.0;
};

}  // namespace autotune
