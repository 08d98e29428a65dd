#include "lanemb/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lanemb/core.hpp"
#include "lanemb/losses.hpp"

namespace lanemb {

std::vector<LanePoints> extract_pred_lanes(const InstanceLabeling& labeling,
                                           int row_stride) {
    if (row_stride < 1) throw std::domain_error("extract_pred_lanes: row_stride must be >= 1");
    std::vector<LanePoints> lanes(labeling.num_instances);
    for (int r = 0; r < labeling.height; r += row_stride) {
        // per instance: sum of column indices and count in this row
        std::vector<double> sum(labeling.num_instances, 0.0);
        std::vector<int> cnt(labeling.num_instances, 0);
        for (int c = 0; c < labeling.width; ++c) {
            int id = labeling.at(r, c);
            if (id == 0) continue;
            sum[id - 1] += c;
            cnt[id - 1] += 1;
        }
        for (int k = 0; k < labeling.num_instances; ++k)
            if (cnt[k] > 0) lanes[k][r] = sum[k] / cnt[k];
    }
    return lanes;
}

namespace {

// Fraction of gt rows where pred has a point within tolerance.
double lane_point_accuracy(const LanePoints& pred, const LanePoints& gt, double tol) {
    if (gt.empty()) return 0.0;
    int correct = 0;
    for (const auto& [row, gx] : gt) {
        auto it = pred.find(row);
        if (it != pred.end() && std::abs(it->second - gx) <= tol) ++correct;
    }
    return static_cast<double>(correct) / gt.size();
}

}  // namespace

TuSimpleResult tusimple_eval(const std::vector<LanePoints>& pred,
                             const std::vector<LanePoints>& gt,
                             const EvalParams& params) {
    struct Cand {
        double acc;
        size_t p, g;
    };
    std::vector<Cand> cands;
    for (size_t a = 0; a < pred.size(); ++a)
        for (size_t b = 0; b < gt.size(); ++b)
            cands.push_back({lane_point_accuracy(pred[a], gt[b], params.point_tolerance), a, b});
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& x, const Cand& y) { return x.acc > y.acc; });

    std::vector<char> used_p(pred.size(), 0), used_g(gt.size(), 0);
    size_t total_gt_points = 0;
    for (const auto& lane : gt) total_gt_points += lane.size();

    size_t correct_points = 0, accepted = 0;
    for (const Cand& c : cands) {
        if (used_p[c.p] || used_g[c.g]) continue;
        if (c.acc < params.lane_accept_threshold) continue;
        used_p[c.p] = used_g[c.g] = 1;
        ++accepted;
        correct_points += static_cast<size_t>(std::llround(c.acc * gt[c.g].size()));
    }

    TuSimpleResult r;
    r.accuracy = total_gt_points
                     ? static_cast<double>(correct_points) / total_gt_points
                     : (pred.empty() ? 1.0 : 0.0);
    r.fp_rate = pred.empty() ? 0.0
                             : static_cast<double>(pred.size() - accepted) / pred.size();
    r.fn_rate = gt.empty() ? 0.0 : static_cast<double>(gt.size() - accepted) / gt.size();
    return r;
}

QualityResult clustering_quality(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                 const EvalParams& params) {
    auto m = match_instances(pred, gt, params.iou_threshold);
    QualityResult q;
    if (!m.ious.empty())
        q.mean_iou = std::accumulate(m.ious.begin(), m.ious.end(), 0.0) / m.ious.size();
    size_t matched = m.pairs.size();
    q.precision = pred.num_instances == 0
                      ? (gt.num_instances == 0 ? 1.0 : 0.0)
                      : static_cast<double>(matched) / pred.num_instances;
    q.recall = gt.num_instances == 0
                   ? 1.0
                   : static_cast<double>(matched) / gt.num_instances;
    return q;
}

namespace {

// Canonical partition: per-pixel cluster id renumbered by first occurrence.
std::vector<uint16_t> canonical(const InstanceLabeling& lab) {
    std::vector<uint16_t> out(lab.labels.size(), 0);
    std::map<uint16_t, uint16_t> remap;
    uint16_t next = 0;
    for (size_t i = 0; i < lab.labels.size(); ++i) {
        uint16_t v = lab.labels[i];
        if (v == 0) continue;
        auto [it, fresh] = remap.try_emplace(v, next + 1);
        if (fresh) ++next;
        out[i] = it->second;
    }
    return out;
}

double median_ms(std::vector<double>& samples) {
    std::sort(samples.begin(), samples.end());
    size_t n = samples.size();
    return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

}  // namespace

TimingReport bench_clustering(const std::vector<BenchInput>& batch,
                              const ClusterParams& params,
                              const DbscanParams& dbscan_params,
                              int warmups, int runs) {
    if (batch.empty()) throw std::invalid_argument("bench_clustering: empty batch");
    if (runs < 1) throw std::invalid_argument("bench_clustering: runs must be >= 1");

    // Sanity: both methods must agree (up to relabeling) before timing.
    for (size_t s = 0; s < batch.size(); ++s) {
        const auto& in = batch[s];
        auto fast = fast_cluster(in.embedding, in.sigma, in.seed, in.fg_mask, params);
        auto db = dbscan(in.embedding, in.fg_mask, dbscan_params);
        if (fast.num_instances != db.num_instances || canonical(fast) != canonical(db))
            throw std::runtime_error(
                "bench_clustering: methods disagree on input " + std::to_string(s) +
                " (fast K=" + std::to_string(fast.num_instances) +
                ", dbscan K=" + std::to_string(db.num_instances) + ")");
    }

    using Clock = std::chrono::steady_clock;
    auto time_once = [&](auto&& fn) {
        auto t0 = Clock::now();
        for (const auto& in : batch) fn(in);
        auto t1 = Clock::now();
        return std::chrono::duration<double, std::milli>(t1 - t0).count() / batch.size();
    };
    auto run_fast = [&](const BenchInput& in) {
        volatile int k = fast_cluster(in.embedding, in.sigma, in.seed, in.fg_mask, params)
                             .num_instances;
        (void)k;
    };
    auto run_db = [&](const BenchInput& in) {
        volatile int k = dbscan(in.embedding, in.fg_mask, dbscan_params).num_instances;
        (void)k;
    };

    for (int i = 0; i < warmups; ++i) {
        time_once(run_fast);
        time_once(run_db);
    }
    std::vector<double> tf, td;
    for (int i = 0; i < runs; ++i) tf.push_back(time_once(run_fast));
    for (int i = 0; i < runs; ++i) td.push_back(time_once(run_db));

    TimingReport rep;
    rep.fast_ms = median_ms(tf);
    rep.dbscan_ms = median_ms(td);
    rep.speedup_ratio = rep.dbscan_ms / rep.fast_ms;
    rep.runs = runs;
    rep.warmups = warmups;
    return rep;
}

BenchInput ideal_fields(const LaneScene& scene, double sigma_value) {
    const int h = scene.labeling.height, w = scene.labeling.width;
    auto coords = make_coordinate_maps(h, w);
    FieldF32 offsets(h, w, 2, 0.0f);
    EmbeddingField emb = spatial_embedding(offsets, coords);
    FieldF32 sigma(h, w, 1, static_cast<float>(sigma_value));
    InstanceStats st = instance_stats(emb, sigma, scene.labeling);

    BenchInput in;
    in.fg_mask = scene.fg_mask;
    in.sigma = sigma;
    in.seed = FieldF32(h, w, 1, 0.0f);
    in.embedding.e = FieldF32(h, w, 2, 0.0f);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            int id = scene.labeling.at(r, c);
            if (id == 0) continue;
            in.embedding.e.at(r, c, 0) = static_cast<float>(st.centroid_x[id - 1]);
            in.embedding.e.at(r, c, 1) = static_cast<float>(st.centroid_y[id - 1]);
            in.seed.at(r, c) = 1.0f;  // collapsed embedding: affinity is exactly 1
        }
    return in;
}

}  // namespace lanemb
