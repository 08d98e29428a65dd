#include "lanemb/core.hpp"

#include <stdexcept>

#include "lanemb/kernels.hpp"

namespace lanemb {

CoordMaps make_coordinate_maps(int height, int width) {
    if (height < 1 || width < 1)
        throw std::invalid_argument("make_coordinate_maps: dimensions must be >= 1");
    CoordMaps m{FieldF32(height, width, 1), FieldF32(height, width, 1)};
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            m.x.at(r, c) = static_cast<float>(c) + 0.5f;
            m.y.at(r, c) = static_cast<float>(r) + 0.5f;
        }
    return m;
}

EmbeddingField spatial_embedding(const FieldF32& offsets, const CoordMaps& coords) {
    if (offsets.channels != 2)
        throw std::invalid_argument("spatial_embedding: offsets must have 2 channels");
    if (offsets.height != coords.x.height || offsets.width != coords.x.width)
        throw std::invalid_argument("spatial_embedding: shape mismatch");

    const int h = offsets.height, w = offsets.width;
    const size_t n = static_cast<size_t>(h) * w;

    // Deinterleave so the adds run over contiguous spans.
    std::vector<float> ox(n), oy(n), ex(n), ey(n);
    for (size_t i = 0; i < n; ++i) {
        ox[i] = offsets.data[2 * i];
        oy[i] = offsets.data[2 * i + 1];
    }
    kernels::add(coords.x.data.data(), ox.data(), ex.data(), n);
    kernels::add(coords.y.data.data(), oy.data(), ey.data(), n);

    EmbeddingField out{FieldF32(h, w, 2)};
    for (size_t i = 0; i < n; ++i) {
        out.e.data[2 * i] = ex[i];
        out.e.data[2 * i + 1] = ey[i];
    }
    return out;
}

InstanceStats instance_stats(const EmbeddingField& embedding, const FieldF32& sigma,
                             const InstanceLabeling& labeling) {
    const int h = labeling.height, w = labeling.width;
    if (embedding.e.height != h || embedding.e.width != w || embedding.e.channels != 2 ||
        sigma.height != h || sigma.width != w || sigma.channels != 1)
        throw std::invalid_argument("instance_stats: shape mismatch");

    const int k = labeling.num_instances;
    InstanceStats s;
    s.centroid_x.assign(k, 0.0);
    s.centroid_y.assign(k, 0.0);
    s.sigma_mean.assign(k, 0.0);
    s.pixel_count.assign(k, 0);

    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            int id = labeling.at(r, c);
            if (id == 0) continue;
            if (sigma.at(r, c) <= 0.0f)
                throw std::domain_error("instance_stats: sigma <= 0 on foreground pixel");
            s.centroid_x[id - 1] += embedding.e.at(r, c, 0);
            s.centroid_y[id - 1] += embedding.e.at(r, c, 1);
            s.sigma_mean[id - 1] += sigma.at(r, c);
            s.pixel_count[id - 1] += 1;
        }
    for (int i = 0; i < k; ++i) {
        // labeling invariant guarantees pixel_count > 0
        double n = static_cast<double>(s.pixel_count[i]);
        s.centroid_x[i] /= n;
        s.centroid_y[i] /= n;
        s.sigma_mean[i] /= n;
    }
    return s;
}

}  // namespace lanemb
