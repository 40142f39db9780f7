#pragma once

// Everything.

#include "angles.hpp"
#include "config.hpp"
#include "correspondence.hpp"
#include "family.hpp"
#include "hyperbolic.hpp"
#include "io.hpp"
#include "lamination.hpp"
#include "numerics.hpp"
#include "puzzles.hpp"
#include "rays.hpp"
#include "render.hpp"
#include "schwarz.hpp"
