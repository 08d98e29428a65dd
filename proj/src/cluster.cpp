#include "lanemb/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "lanemb/kernels.hpp"

namespace lanemb {

void ClusterParams::validate() const {
    if (!(seed_threshold > 0.0 && seed_threshold < 1.0))
        throw std::domain_error("ClusterParams: seed_threshold must be in (0,1)");
    if (!(prob_threshold > 0.0 && prob_threshold < 1.0))
        throw std::domain_error("ClusterParams: prob_threshold must be in (0,1)");
    if (max_instances < 1) throw std::domain_error("ClusterParams: max_instances must be >= 1");
    if (min_pixels < 0) throw std::domain_error("ClusterParams: min_pixels must be >= 0");
}

void DbscanParams::validate() const {
    if (!(eps > 0.0)) throw std::domain_error("DbscanParams: eps must be > 0");
    if (min_pts < 1) throw std::domain_error("DbscanParams: min_pts must be >= 1");
}

namespace {

void check_shapes(const EmbeddingField& embedding, const Mask& fg_mask) {
    if (embedding.e.channels != 2 || embedding.e.height != fg_mask.height ||
        embedding.e.width != fg_mask.width)
        throw std::invalid_argument("cluster: shape mismatch");
}

}  // namespace

InstanceLabeling fast_cluster(const EmbeddingField& embedding, const FieldF32& sigma,
                              const FieldF32& seed, const Mask& fg_mask,
                              const ClusterParams& params) {
    params.validate();
    check_shapes(embedding, fg_mask);
    if (sigma.channels != 1 || sigma.height != fg_mask.height || sigma.width != fg_mask.width ||
        seed.channels != 1 || seed.height != fg_mask.height || seed.width != fg_mask.width)
        throw std::invalid_argument("fast_cluster: shape mismatch");

    const int h = fg_mask.height, w = fg_mask.width;
    const size_t npix = static_cast<size_t>(h) * w;

    // SoA over unassigned fg pixels, kept in row-major order so the first
    // maximal seed is the smallest row-major index.
    std::vector<uint32_t> idx;
    std::vector<float> ex, ey, sg, sd;
    for (size_t i = 0; i < npix; ++i) {
        if (!fg_mask.data[i]) continue;
        idx.push_back(static_cast<uint32_t>(i));
        ex.push_back(embedding.e.data[2 * i]);
        ey.push_back(embedding.e.data[2 * i + 1]);
        sg.push_back(sigma.data[i]);
        sd.push_back(seed.data[i]);
    }

    std::vector<uint16_t> labels(npix, 0);
    std::vector<std::vector<uint32_t>> instances;
    std::vector<uint8_t> hit(idx.size());
    const float seed_thr = static_cast<float>(params.seed_threshold);
    const double log_pr = std::log(params.prob_threshold);

    size_t alive = idx.size();
    while (static_cast<int>(instances.size()) < params.max_instances) {
        // argmax seed among alive, first occurrence wins
        size_t best = alive;
        float best_seed = seed_thr;
        for (size_t j = 0; j < alive; ++j) {
            if (sd[j] > best_seed || (sd[j] == best_seed && sd[j] >= seed_thr && best == alive)) {
                best = j;
                best_seed = sd[j];
            }
        }
        if (best == alive) break;

        float cx = ex[best], cy = ey[best];
        float sstar = sg[best];
        if (!(sstar > 0.0f))
            throw std::domain_error("fast_cluster: sigma <= 0 at seed pixel");
        // phi >= Pr  <=>  dist^2 <= -2*sigma*^2*ln(Pr)
        float r2 = static_cast<float>(-2.0 * static_cast<double>(sstar) * sstar * log_pr);

        kernels::mark_within_radius(ex.data(), ey.data(), alive, cx, cy, r2, hit.data());
        hit[best] = 1;  // the seed itself (distance 0) always belongs

        std::vector<uint32_t> members;
        size_t keep = 0;
        for (size_t j = 0; j < alive; ++j) {
            if (hit[j]) {
                members.push_back(idx[j]);
            } else {
                idx[keep] = idx[j];
                ex[keep] = ex[j];
                ey[keep] = ey[j];
                sg[keep] = sg[j];
                sd[keep] = sd[j];
                ++keep;
            }
        }
        alive = keep;
        instances.push_back(std::move(members));
    }

    // Dissolve speckles, relabel survivors compactly in discovery order.
    int next_id = 0;
    for (auto& members : instances) {
        if (static_cast<int>(members.size()) < params.min_pixels) continue;
        ++next_id;
        for (uint32_t i : members) labels[i] = static_cast<uint16_t>(next_id);
    }
    return InstanceLabeling(h, w, next_id, std::move(labels));
}

InstanceLabeling dbscan(const EmbeddingField& embedding, const Mask& fg_mask,
                        const DbscanParams& params) {
    params.validate();
    check_shapes(embedding, fg_mask);

    const int h = fg_mask.height, w = fg_mask.width;
    const size_t npix = static_cast<size_t>(h) * w;

    std::vector<uint32_t> idx;
    std::vector<float> px, py;
    for (size_t i = 0; i < npix; ++i) {
        if (!fg_mask.data[i]) continue;
        idx.push_back(static_cast<uint32_t>(i));
        px.push_back(embedding.e.data[2 * i]);
        py.push_back(embedding.e.data[2 * i + 1]);
    }
    const size_t n = idx.size();

    // Uniform grid of cell size eps; a radius query touches 3x3 cells.
    const double eps = params.eps;
    const double eps2 = eps * eps;
    auto cell_of = [&](float x, float y) {
        return std::pair<int64_t, int64_t>(
            static_cast<int64_t>(std::floor(x / eps)),
            static_cast<int64_t>(std::floor(y / eps)));
    };
    auto key_of = [](int64_t cx, int64_t cy) {
        return (static_cast<uint64_t>(cx) << 32) ^ static_cast<uint64_t>(cy & 0xffffffff);
    };
    std::unordered_map<uint64_t, std::vector<uint32_t>> grid;
    for (size_t j = 0; j < n; ++j) {
        auto [cx, cy] = cell_of(px[j], py[j]);
        grid[key_of(cx, cy)].push_back(static_cast<uint32_t>(j));
    }

    auto region_query = [&](size_t j, std::vector<uint32_t>& out) {
        out.clear();
        auto [cx, cy] = cell_of(px[j], py[j]);
        for (int64_t dx = -1; dx <= 1; ++dx)
            for (int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid.find(key_of(cx + dx, cy + dy));
                if (it == grid.end()) continue;
                for (uint32_t q : it->second) {
                    double ddx = static_cast<double>(px[q]) - px[j];
                    double ddy = static_cast<double>(py[q]) - py[j];
                    if (ddx * ddx + ddy * ddy <= eps2) out.push_back(q);
                }
            }
    };

    constexpr int kUnvisited = -2, kNoise = -1;
    std::vector<int> assignment(n, kUnvisited);
    int clusters = 0;
    std::vector<uint32_t> neighbors, nb2;

    for (size_t j = 0; j < n; ++j) {
        if (assignment[j] != kUnvisited) continue;
        region_query(j, neighbors);
        if (static_cast<int>(neighbors.size()) < params.min_pts) {
            assignment[j] = kNoise;
            continue;
        }
        int cid = clusters++;
        assignment[j] = cid;
        std::deque<uint32_t> queue(neighbors.begin(), neighbors.end());
        while (!queue.empty()) {
            uint32_t q = queue.front();
            queue.pop_front();
            if (assignment[q] == kNoise) assignment[q] = cid;  // border point
            if (assignment[q] != kUnvisited) continue;
            assignment[q] = cid;
            region_query(q, nb2);
            if (static_cast<int>(nb2.size()) >= params.min_pts)
                queue.insert(queue.end(), nb2.begin(), nb2.end());
        }
    }

    std::vector<uint16_t> labels(npix, 0);
    for (size_t j = 0; j < n; ++j)
        if (assignment[j] >= 0) labels[idx[j]] = static_cast<uint16_t>(assignment[j] + 1);
    return InstanceLabeling(h, w, clusters, std::move(labels));
}

InstanceMatching match_instances(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                 double iou_threshold) {
    if (pred.height != gt.height || pred.width != gt.width)
        throw std::invalid_argument("match_instances: shape mismatch");

    const int kp = pred.num_instances, kg = gt.num_instances;
    std::vector<size_t> pred_area(kp, 0), gt_area(kg, 0);
    std::vector<std::vector<size_t>> inter(kp, std::vector<size_t>(kg, 0));
    for (size_t i = 0; i < pred.labels.size(); ++i) {
        int a = pred.labels[i], b = gt.labels[i];
        if (a > 0) pred_area[a - 1]++;
        if (b > 0) gt_area[b - 1]++;
        if (a > 0 && b > 0) inter[a - 1][b - 1]++;
    }

    struct Cand {
        double iou;
        int p, g;
    };
    std::vector<Cand> cands;
    for (int a = 0; a < kp; ++a)
        for (int b = 0; b < kg; ++b) {
            size_t u = pred_area[a] + gt_area[b] - inter[a][b];
            double iou = u ? static_cast<double>(inter[a][b]) / u : 0.0;
            if (iou >= iou_threshold) cands.push_back({iou, a + 1, b + 1});
        }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& x, const Cand& y) { return x.iou > y.iou; });

    InstanceMatching m;
    std::vector<char> used_p(kp + 1, 0), used_g(kg + 1, 0);
    for (const Cand& c : cands) {
        if (used_p[c.p] || used_g[c.g]) continue;
        used_p[c.p] = used_g[c.g] = 1;
        m.pairs.emplace_back(c.p, c.g);
        m.ious.push_back(c.iou);
    }
    for (int a = 1; a <= kp; ++a)
        if (!used_p[a]) m.unmatched_pred.push_back(a);
    for (int b = 1; b <= kg; ++b)
        if (!used_g[b]) m.unmatched_gt.push_back(b);
    return m;
}

}  // namespace lanemb
