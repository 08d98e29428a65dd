#include "lanemb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lanemb {

void SynthConfig::validate() const {
    if (height < 1 || width < 1) throw std::domain_error("SynthConfig: bad dimensions");
    if (num_lanes < 1 || num_lanes > 8)
        throw std::domain_error("SynthConfig: num_lanes must be 1..8");
    if (thickness < 1) throw std::domain_error("SynthConfig: thickness must be >= 1");
    if (curv_min > curv_max) throw std::domain_error("SynthConfig: empty curvature range");
    if (row_stride < 1) throw std::domain_error("SynthConfig: row_stride must be >= 1");
}

namespace {

// splitmix64; stdlib-independent so scenes are reproducible across platforms.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }
};

bool lane_in_bounds(const LaneCurve& lane, const SynthConfig& cfg) {
    double half = cfg.thickness / 2.0;
    for (int r = 0; r < cfg.height; ++r) {
        double x = lane.x_at_row(r, cfg.height);
        if (x - half < 0.0 || x + half > cfg.width - 1.0) return false;
    }
    return true;
}

bool separated(const LaneCurve& a, const LaneCurve& b, const SynthConfig& cfg) {
    for (int r = 0; r < cfg.height; ++r)
        if (std::abs(a.x_at_row(r, cfg.height) - b.x_at_row(r, cfg.height)) <
            2.0 * cfg.thickness)
            return false;
    return true;
}

}  // namespace

Mask rasterize_lane(const LaneCurve& curve, int thickness, int height, int width) {
    if (thickness < 1) throw std::domain_error("rasterize_lane: thickness must be >= 1");
    Mask m(height, width);
    double half = thickness / 2.0;
    for (int r = 0; r < height; ++r) {
        double x = curve.x_at_row(r, height);
        int lo = static_cast<int>(std::ceil(x - half));
        int hi = static_cast<int>(std::floor(x + half));
        lo = std::max(lo, 0);
        hi = std::min(hi, width - 1);
        for (int c = lo; c <= hi; ++c) m.at(r, c) = 1;
    }
    return m;
}

LaneScene generate_scene(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.rng_seed);

    double half = cfg.thickness / 2.0;
    double a_lo = half, a_hi = cfg.width - 1.0 - half;
    if (a_lo >= a_hi)
        throw std::runtime_error("generate_scene: image too narrow for lane thickness");

    constexpr int kMaxAttempts = 1000;
    std::vector<LaneCurve> curves;
    for (int lane = 0; lane < cfg.num_lanes; ++lane) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            LaneCurve cand;
            cand.a = rng.uniform(a_lo, a_hi);
            cand.b = rng.uniform(cfg.curv_min, cfg.curv_max);
            cand.c = rng.uniform(cfg.curv_min, cfg.curv_max);
            if (!lane_in_bounds(cand, cfg)) continue;
            bool ok = true;
            for (const auto& other : curves)
                if (!separated(cand, other, cfg)) {
                    ok = false;
                    break;
                }
            if (ok) {
                curves.push_back(cand);
                placed = true;
            }
        }
        if (!placed)
            throw std::runtime_error(
                "generate_scene: could not place lane " + std::to_string(lane + 1) +
                " within " + std::to_string(kMaxAttempts) + " attempts");
    }

    // ids 1..K ordered left-to-right at the bottom row
    std::sort(curves.begin(), curves.end(), [&](const LaneCurve& a, const LaneCurve& b) {
        return a.x_at_row(cfg.height - 1, cfg.height) < b.x_at_row(cfg.height - 1, cfg.height);
    });

    std::vector<uint16_t> labels(static_cast<size_t>(cfg.height) * cfg.width, 0);
    for (size_t k = 0; k < curves.size(); ++k) {
        Mask m = rasterize_lane(curves[k], cfg.thickness, cfg.height, cfg.width);
        for (size_t i = 0; i < m.data.size(); ++i)
            if (m.data[i]) labels[i] = static_cast<uint16_t>(k + 1);
    }

    LaneScene scene;
    scene.cfg = cfg;
    scene.curves = curves;
    scene.labeling = InstanceLabeling(cfg.height, cfg.width,
                                      static_cast<int>(curves.size()), std::move(labels));
    scene.fg_mask = foreground_mask(scene.labeling);
    scene.lanes.resize(curves.size());
    for (size_t k = 0; k < curves.size(); ++k)
        for (int r = 0; r < cfg.height; r += cfg.row_stride)
            scene.lanes[k][r] = curves[k].x_at_row(r, cfg.height);
    return scene;
}

}  // namespace lanemb
