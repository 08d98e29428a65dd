// Deterministic synthetic lane scenes: quadratic curves in normalized y,
// rasterized as per-row horizontal intervals.
//
// Lane x positions are in column units: the center of column c is x = c.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "lanemb/field.hpp"

namespace lanemb {

struct SynthConfig {
    int height = 128;
    int width = 64;
    int num_lanes = 4;       // 1..8
    int thickness = 3;       // pixels
    double curv_min = -12.0; // bounds for the b and c coefficients, pixels
    double curv_max = 12.0;
    uint64_t rng_seed = 0;
    int row_stride = 4;      // centerline sampling

    void validate() const;
};

struct LaneCurve {
    // x(y) = a + b*(y/H) + c*(y/H)^2, x in column units
    double a = 0, b = 0, c = 0;

    double x_at_row(int row, int height) const {
        double t = (row + 0.5) / height;
        return a + b * t + c * t * t;
    }
};

using LanePoints = std::map<int, double>;  // row -> x (column units)

struct LaneScene {
    InstanceLabeling labeling;
    Mask fg_mask;
    std::vector<LanePoints> lanes;   // per instance, ordered by id
    std::vector<LaneCurve> curves;   // same order
    SynthConfig cfg;
};

// Deterministic given cfg.rng_seed. Lanes keep >= 2*thickness horizontal
// separation at every row and stay inside the image; instance ids are 1..K
// ordered left-to-right at the bottom row. Throws std::runtime_error when
// rejection sampling exhausts its attempt budget.
LaneScene generate_scene(const SynthConfig& cfg);

// Per-row interval |c - x(y)| <= thickness/2, clipped to image bounds.
Mask rasterize_lane(const LaneCurve& curve, int thickness, int height, int width);

}  // namespace lanemb
