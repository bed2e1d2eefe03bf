#pragma once

// Umbrella header: AP-free permutations and sets — detection, exhaustive
// counting, infinite block constructions, densities, and bound checks.

#include "apfree/core.hpp"
#include "apfree/counting.hpp"
#include "apfree/cache.hpp"
#include "apfree/streams.hpp"
#include "apfree/density.hpp"
#include "apfree/bounds.hpp"
