#pragma once

// Umbrella header.

#include "complex.hpp"
#include "cube.hpp"
#include "field.hpp"
#include "generators.hpp"
#include "io.hpp"
#include "keylemma.hpp"
#include "khovanov.hpp"
#include "oracle.hpp"
#include "reduce.hpp"
#include "sparse.hpp"
#include "triads.hpp"
