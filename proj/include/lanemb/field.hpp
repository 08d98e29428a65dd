// Dense field containers and the LEF1/LEL1 binary formats.
//
// FieldF32 is a row-major H x W x C grid of 32-bit floats, channel-innermost.
// InstanceLabeling stores one u16 label per pixel, 0 = background, 1..K = instances.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace lanemb {

struct FieldF32 {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<float> data;

    FieldF32() = default;
    FieldF32(int h, int w, int c, float fill = 0.0f)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {
        if (h < 1 || w < 1 || c < 1)
            throw std::invalid_argument("FieldF32: dimensions must be >= 1");
    }

    size_t size() const { return data.size(); }

    float& at(int r, int c, int ch = 0) {
        return data[(static_cast<size_t>(r) * width + c) * channels + ch];
    }
    float at(int r, int c, int ch = 0) const {
        return data[(static_cast<size_t>(r) * width + c) * channels + ch];
    }

    bool same_shape(const FieldF32& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    bool all_finite() const;
};

struct InstanceLabeling {
    int height = 0;
    int width = 0;
    int num_instances = 0;  // K
    std::vector<uint16_t> labels;

    InstanceLabeling() = default;
    // Validates that labels lie in {0..K} and every id in 1..K occurs.
    InstanceLabeling(int h, int w, int k, std::vector<uint16_t> lab);

    uint16_t at(int r, int c) const {
        return labels[static_cast<size_t>(r) * width + c];
    }
    bool is_foreground(int r, int c) const { return at(r, c) > 0; }
    size_t foreground_count() const;
};

// Binary foreground mask, one byte per pixel (0 or 1).
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int h, int w, uint8_t fill = 0)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

    uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
    uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
};

Mask foreground_mask(const InstanceLabeling& lab);

// LEF1: "LEF1" | u32 height | u32 width | u32 channels | f32 payload.
// LEL1: "LEL1" | u32 height | u32 width | u32 K | u16 payload.
// All little-endian.
void save_lef1(const std::filesystem::path& path, const FieldF32& f);
FieldF32 load_lef1(const std::filesystem::path& path);
void save_lel1(const std::filesystem::path& path, const InstanceLabeling& lab);
InstanceLabeling load_lel1(const std::filesystem::path& path);

}  // namespace lanemb
