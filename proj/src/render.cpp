#include "lanemb/render.hpp"

#include <cmath>
#include <fstream>
#include <vector>

namespace lanemb {

std::array<uint8_t, 3> instance_color(int id) {
    static constexpr std::array<std::array<uint8_t, 3>, 12> palette = {{
        {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
        {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
        {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
    }};
    if (id <= 0) return {0, 0, 0};
    return palette[(id - 1) % palette.size()];
}

namespace {

void write_ppm(const std::filesystem::path& out, int h, int w,
               const std::vector<uint8_t>& rgb) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + out.string());
    os << "P6\n" << w << " " << h << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()),
             static_cast<std::streamsize>(rgb.size()));
    if (!os) throw std::runtime_error("write failed: " + out.string());
}

}  // namespace

void render_labeling(const InstanceLabeling& lab, const std::filesystem::path& out) {
    std::vector<uint8_t> rgb(static_cast<size_t>(lab.height) * lab.width * 3, 0);
    for (size_t i = 0; i < lab.labels.size(); ++i) {
        auto col = instance_color(lab.labels[i]);
        rgb[3 * i] = col[0];
        rgb[3 * i + 1] = col[1];
        rgb[3 * i + 2] = col[2];
    }
    write_ppm(out, lab.height, lab.width, rgb);
}

void render_embedding(const EmbeddingField& embedding, const InstanceLabeling& lab,
                      const std::filesystem::path& out) {
    const int h = lab.height, w = lab.width;
    if (embedding.e.height != h || embedding.e.width != w || embedding.e.channels != 2)
        throw std::invalid_argument("render_embedding: shape mismatch");
    std::vector<uint8_t> rgb(static_cast<size_t>(h) * w * 3, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            int id = lab.at(r, c);
            if (id == 0) continue;
            // pixel-center convention: embedding (x,y) falls in raster cell
            // (floor(y), floor(x))
            int pc = static_cast<int>(std::floor(embedding.e.at(r, c, 0)));
            int pr = static_cast<int>(std::floor(embedding.e.at(r, c, 1)));
            if (pr < 0 || pr >= h || pc < 0 || pc >= w) continue;
            auto col = instance_color(id);
            size_t i = (static_cast<size_t>(pr) * w + pc) * 3;
            rgb[i] = col[0];
            rgb[i + 1] = col[1];
            rgb[i + 2] = col[2];
        }
    write_ppm(out, h, w, rgb);
}

}  // namespace lanemb
