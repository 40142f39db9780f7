#pragma once

#include <string>

namespace qdyn {

// Every numerical threshold used by the library, with its default.
struct Tolerances {
    double root = 1e-12;               // root-finder residual scale
    int root_max_iter = 500;           // Aberth iterations before a restart
    double disk_band = 1e-10;          // disk-boundary tie-break width
    double tile_margin = 1e-10;        // interior margin for the rank-0 tile
    double singular_band = 1e-8;       // ambiguity band around singular points
    double stagnation_radius = 1e-3;   // exhausted orbits this close to a singular point stay undecided
    double cluster = 1e-5;             // landing-point clustering radius
    double branch_ambiguity = 1e-8;    // two roots this close make a branch choice ambiguous
    int newton_steps = 8;              // Newton steps allowed per continuation step
    double landing = 1e-6;             // Cauchy tail diameter for ray landing
    double node_exclusion = 1e-3;      // radius excluded around correspondence nodes
    double check = 1e-8;               // residual threshold for verification checks
};

}  // namespace qdyn
