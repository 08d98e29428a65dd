#include "lanemb/field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace lanemb {

bool FieldF32::all_finite() const {
    for (float v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

InstanceLabeling::InstanceLabeling(int h, int w, int k, std::vector<uint16_t> lab)
    : height(h), width(w), num_instances(k), labels(std::move(lab)) {
    if (h < 1 || w < 1 || k < 0)
        throw std::invalid_argument("InstanceLabeling: bad dimensions");
    if (labels.size() != static_cast<size_t>(h) * w)
        throw std::invalid_argument("InstanceLabeling: label buffer size mismatch");
    std::vector<char> seen(static_cast<size_t>(k) + 1, 0);
    for (uint16_t v : labels) {
        if (v > k)
            throw std::invalid_argument("InstanceLabeling: label exceeds num_instances");
        seen[v] = 1;
    }
    for (int id = 1; id <= k; ++id)
        if (!seen[id])
            throw std::invalid_argument("InstanceLabeling: instance id " +
                                        std::to_string(id) + " has no pixels");
}

size_t InstanceLabeling::foreground_count() const {
    size_t n = 0;
    for (uint16_t v : labels) n += (v > 0);
    return n;
}

Mask foreground_mask(const InstanceLabeling& lab) {
    Mask m(lab.height, lab.width);
    for (size_t i = 0; i < lab.labels.size(); ++i) m.data[i] = lab.labels[i] > 0;
    return m;
}

namespace {

void write_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void check_magic(std::istream& is, const char* magic, const char* what) {
    char got[4];
    is.read(got, 4);
    if (!is || std::memcmp(got, magic, 4) != 0)
        throw std::runtime_error(std::string(what) + ": bad magic");
}

}  // namespace

void save_lef1(const std::filesystem::path& path, const FieldF32& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os.write("LEF1", 4);
    write_u32(os, static_cast<uint32_t>(f.height));
    write_u32(os, static_cast<uint32_t>(f.width));
    write_u32(os, static_cast<uint32_t>(f.channels));
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(f.data.data()),
             static_cast<std::streamsize>(f.data.size() * 4));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

FieldF32 load_lef1(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    check_magic(is, "LEF1", "LEF1");
    uint32_t h = read_u32(is), w = read_u32(is), c = read_u32(is);
    if (!is || h == 0 || w == 0 || c == 0)
        throw std::runtime_error("LEF1: bad header in " + path.string());
    FieldF32 f(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    is.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * 4));
    if (!is) throw std::runtime_error("LEF1: truncated payload in " + path.string());
    return f;
}

void save_lel1(const std::filesystem::path& path, const InstanceLabeling& lab) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os.write("LEL1", 4);
    write_u32(os, static_cast<uint32_t>(lab.height));
    write_u32(os, static_cast<uint32_t>(lab.width));
    write_u32(os, static_cast<uint32_t>(lab.num_instances));
    for (uint16_t v : lab.labels) {
        unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
        os.write(reinterpret_cast<const char*>(b), 2);
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

InstanceLabeling load_lel1(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    check_magic(is, "LEL1", "LEL1");
    uint32_t h = read_u32(is), w = read_u32(is), k = read_u32(is);
    if (!is || h == 0 || w == 0)
        throw std::runtime_error("LEL1: bad header in " + path.string());
    std::vector<uint16_t> labels(static_cast<size_t>(h) * w);
    for (auto& v : labels) {
        unsigned char b[2];
        is.read(reinterpret_cast<char*>(b), 2);
        v = static_cast<uint16_t>(b[0] | (b[1] << 8));
    }
    if (!is) throw std::runtime_error("LEL1: truncated payload in " + path.string());
    return InstanceLabeling(static_cast<int>(h), static_cast<int>(w),
                            static_cast<int>(k), std::move(labels));
}

}  // namespace lanemb
