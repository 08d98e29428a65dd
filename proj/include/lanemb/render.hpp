// P6 PPM rendering of labelings and embedding scatters.

#pragma once

#include <array>
#include <filesystem>

#include "lanemb/core.hpp"
#include "lanemb/field.hpp"

namespace lanemb {

std::array<uint8_t, 3> instance_color(int id);  // fixed palette; 0 = black

void render_labeling(const InstanceLabeling& lab, const std::filesystem::path& out);

// Scatters each foreground pixel's embedding position into image space,
// colored by its instance id.
void render_embedding(const EmbeddingField& embedding, const InstanceLabeling& lab,
                      const std::filesystem::path& out);

}  // namespace lanemb
