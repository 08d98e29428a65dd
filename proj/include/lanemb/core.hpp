// Coordinate maps, spatial embedding construction and per-instance statistics.
//
// Conventions: pixel centers, so x[r][c] = c + 0.5 and y[r][c] = r + 0.5.
// Embeddings and sigma are in raw pixel units.

#pragma once

#include <vector>

#include "lanemb/field.hpp"

namespace lanemb {

struct CoordMaps {
    FieldF32 x;  // 1 channel
    FieldF32 y;  // 1 channel
};

struct EmbeddingField {
    FieldF32 e;  // 2 channels: e_x, e_y
};

struct InstanceStats {
    // Index 0 corresponds to instance id 1.
    std::vector<double> centroid_x;
    std::vector<double> centroid_y;
    std::vector<double> sigma_mean;
    std::vector<size_t> pixel_count;

    size_t num_instances() const { return pixel_count.size(); }
};

CoordMaps make_coordinate_maps(int height, int width);

// e = coords + offsets, elementwise. offsets must have 2 channels.
EmbeddingField spatial_embedding(const FieldF32& offsets, const CoordMaps& coords);

// Per-instance centroid of embeddings, mean sigma and pixel count.
// Throws std::domain_error if sigma <= 0 on a foreground pixel.
InstanceStats instance_stats(const EmbeddingField& embedding, const FieldF32& sigma,
                             const InstanceLabeling& labeling);

}  // namespace lanemb
