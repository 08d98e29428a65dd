#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "lanemb/cluster.hpp"
#include "lanemb/core.hpp"
#include "lanemb/losses.hpp"
#include "oracles.hpp"

using namespace lanemb;

namespace {

// Two 3x3 foreground blobs whose embeddings collapse to two points 20 px apart.
struct TwoBlobs {
    int h = 8, w = 32;
    Mask fg;
    EmbeddingField emb;
    FieldF32 sigma, seed;
    std::vector<size_t> blob_a, blob_b;

    TwoBlobs() : fg(8, 32), emb{FieldF32(8, 32, 2, 0.0f)},
                 sigma(8, 32, 1, 1.0f), seed(8, 32, 1, 0.0f) {
        for (int r = 2; r < 5; ++r)
            for (int c = 2; c < 5; ++c) place(r, c, 4.0f, 3.0f, blob_a);
        for (int r = 2; r < 5; ++r)
            for (int c = 24; c < 27; ++c) place(r, c, 24.0f, 3.0f, blob_b);
    }
    void place(int r, int c, float ex, float ey, std::vector<size_t>& blob) {
        fg.at(r, c) = 1;
        emb.e.at(r, c, 0) = ex;
        emb.e.at(r, c, 1) = ey;
        seed.at(r, c) = 0.9f;
        blob.push_back(static_cast<size_t>(r) * w + c);
    }
};

std::vector<uint16_t> canonical(const InstanceLabeling& lab) {
    std::vector<uint16_t> out(lab.labels.size(), 0);
    std::map<uint16_t, uint16_t> remap;
    uint16_t next = 0;
    for (size_t i = 0; i < lab.labels.size(); ++i) {
        if (lab.labels[i] == 0) continue;
        auto [it, fresh] = remap.try_emplace(lab.labels[i], next + 1);
        if (fresh) ++next;
        out[i] = it->second;
    }
    return out;
}

}  // namespace

TEST_CASE("fast_cluster: no eligible seed gives zero instances") {
    TwoBlobs s;
    FieldF32 zero_seed(s.h, s.w, 1, 0.0f);
    ClusterParams params;
    params.min_pixels = 1;
    auto lab = fast_cluster(s.emb, s.sigma, zero_seed, s.fg, params);
    CHECK(lab.num_instances == 0);
    for (auto v : lab.labels) CHECK(v == 0);
}

TEST_CASE("fast_cluster: collapsed embedding forms one instance over all fg") {
    int h = 6, w = 6;
    Mask fg(h, w);
    EmbeddingField emb{FieldF32(h, w, 2, 0.0f)};
    FieldF32 sigma(h, w, 1, 1.0f), seed(h, w, 1, 0.0f);
    for (int r = 1; r < 5; ++r)
        for (int c = 1; c < 5; ++c) {
            fg.at(r, c) = 1;
            emb.e.at(r, c, 0) = 3.0f;
            emb.e.at(r, c, 1) = 3.0f;
            seed.at(r, c) = 0.9f;
        }
    ClusterParams params;
    params.min_pixels = 1;
    auto lab = fast_cluster(emb, sigma, seed, fg, params);
    CHECK(lab.num_instances == 1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            CHECK(lab.at(r, c) == (fg.at(r, c) ? 1 : 0));
}

TEST_CASE("fast_cluster: two blobs 20 px apart become two instances") {
    TwoBlobs s;
    ClusterParams params;
    params.min_pixels = 1;
    auto lab = fast_cluster(s.emb, s.sigma, s.seed, s.fg, params);
    REQUIRE(lab.num_instances == 2);
    // margin at sigma=1, Pr=0.5 is ~1.18 px, far below the 20 px separation
    uint16_t ida = lab.labels[s.blob_a[0]];
    uint16_t idb = lab.labels[s.blob_b[0]];
    CHECK(ida != idb);
    for (size_t i : s.blob_a) CHECK(lab.labels[i] == ida);
    for (size_t i : s.blob_b) CHECK(lab.labels[i] == idb);
}

TEST_CASE("fast_cluster: assigned pixels satisfy the affinity bound") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<float> pos(0.0f, 16.0f);
    int h = 16, w = 16;
    Mask fg(h, w);
    EmbeddingField emb{FieldF32(h, w, 2, 0.0f)};
    FieldF32 sigma(h, w, 1, 0.0f), seed(h, w, 1, 0.0f);
    std::uniform_real_distribution<float> sig(0.5f, 2.0f), sd(0.0f, 1.0f);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            fg.at(r, c) = (rng() % 2);
            emb.e.at(r, c, 0) = pos(rng);
            emb.e.at(r, c, 1) = pos(rng);
            sigma.at(r, c) = sig(rng);
            seed.at(r, c) = sd(rng);
        }
    ClusterParams params;
    params.min_pixels = 1;
    auto lab = fast_cluster(emb, sigma, seed, fg, params);

    // reconstruct each instance's seeding center: its pixel of maximal seed
    // cannot be recovered after the fact, so check the weaker per-instance
    // bound: every member is within the margin of the member that could have
    // seeded it (the one whose ball contains all others).
    for (int id = 1; id <= lab.num_instances; ++id) {
        std::vector<size_t> members;
        for (size_t i = 0; i < lab.labels.size(); ++i)
            if (lab.labels[i] == id) members.push_back(i);
        bool some_center_works = false;
        for (size_t ctr : members) {
            double r2 = -2.0 * sigma.data[ctr] * sigma.data[ctr] * std::log(0.5);
            bool all = true;
            for (size_t m : members) {
                double dx = emb.e.data[2 * m] - emb.e.data[2 * ctr];
                double dy = emb.e.data[2 * m + 1] - emb.e.data[2 * ctr + 1];
                all = all && (dx * dx + dy * dy <= r2 * (1 + 1e-6));
            }
            some_center_works = some_center_works || all;
        }
        CHECK(some_center_works);
    }
    // never assigns background
    for (size_t i = 0; i < lab.labels.size(); ++i)
        if (!fg.data[i]) CHECK(lab.labels[i] == 0);
}

TEST_CASE("fast_cluster: min_pixels dissolves speckles") {
    TwoBlobs s;
    ClusterParams params;
    params.min_pixels = 100;  // both 9-px blobs dissolve
    auto lab = fast_cluster(s.emb, s.sigma, s.seed, s.fg, params);
    CHECK(lab.num_instances == 0);
}

TEST_CASE("fast_cluster: max_instances caps the loop") {
    TwoBlobs s;
    ClusterParams params;
    params.min_pixels = 1;
    params.max_instances = 1;
    auto lab = fast_cluster(s.emb, s.sigma, s.seed, s.fg, params);
    CHECK(lab.num_instances == 1);
}

TEST_CASE("fast_cluster is deterministic") {
    TwoBlobs s;
    ClusterParams params;
    auto a = fast_cluster(s.emb, s.sigma, s.seed, s.fg, params);
    auto b = fast_cluster(s.emb, s.sigma, s.seed, s.fg, params);
    CHECK(a.labels == b.labels);
}

TEST_CASE("fast_cluster: shape mismatch") {
    TwoBlobs s;
    Mask wrong(4, 4);
    CHECK_THROWS_AS(fast_cluster(s.emb, s.sigma, s.seed, wrong, ClusterParams{}),
                    std::invalid_argument);
}

TEST_CASE("dbscan: single point below min_pts is noise") {
    Mask fg(3, 3);
    fg.at(1, 1) = 1;
    EmbeddingField emb{FieldF32(3, 3, 2, 0.0f)};
    DbscanParams params;
    params.min_pts = 2;
    auto lab = dbscan(emb, fg, params);
    CHECK(lab.num_instances == 0);
}

TEST_CASE("dbscan: identical embeddings form one cluster") {
    Mask fg(3, 3);
    EmbeddingField emb{FieldF32(3, 3, 2, 0.0f)};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            fg.at(r, c) = 1;
            emb.e.at(r, c, 0) = 5.0f;
            emb.e.at(r, c, 1) = 5.0f;
        }
    DbscanParams params;
    params.min_pts = 3;
    auto lab = dbscan(emb, fg, params);
    CHECK(lab.num_instances == 1);
    for (auto v : lab.labels) CHECK(v == 1);
}

TEST_CASE("dbscan matches a brute-force implementation on the two-blob scene") {
    TwoBlobs s;
    DbscanParams params;
    params.eps = 2.0;
    params.min_pts = 3;
    auto lab = dbscan(s.emb, s.fg, params);
    REQUIRE(lab.num_instances == 2);

    ClusterParams fp;
    fp.min_pixels = 1;
    auto fast = fast_cluster(s.emb, s.sigma, s.seed, s.fg, fp);
    CHECK(canonical(lab) == canonical(fast));

    // brute-force neighborhoods: every pair within a blob is at distance 0,
    // across blobs 20 -> exactly the blob partition
    for (size_t i : s.blob_a) CHECK(lab.labels[i] == lab.labels[s.blob_a[0]]);
    for (size_t i : s.blob_b) CHECK(lab.labels[i] == lab.labels[s.blob_b[0]]);
    CHECK(lab.labels[s.blob_a[0]] != lab.labels[s.blob_b[0]]);
}

TEST_CASE("dbscan partition is stable under point shuffling (canonicalized)") {
    // shuffle by remapping pixel positions; the embedding multiset is fixed
    std::mt19937 rng(77);
    int h = 10, w = 10;
    std::vector<std::pair<float, float>> pts;
    std::uniform_real_distribution<float> jit(-0.5f, 0.5f);
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 12; ++i)
            pts.push_back({10.0f * b + jit(rng), 5.0f + jit(rng)});

    auto build = [&](const std::vector<std::pair<float, float>>& order) {
        Mask fg(h, w);
        EmbeddingField emb{FieldF32(h, w, 2, 0.0f)};
        for (size_t i = 0; i < order.size(); ++i) {
            int r = static_cast<int>(i) / w, c = static_cast<int>(i) % w;
            fg.at(r, c) = 1;
            emb.e.at(r, c, 0) = order[i].first;
            emb.e.at(r, c, 1) = order[i].second;
        }
        return std::pair{emb, fg};
    };

    DbscanParams params;
    params.eps = 2.0;
    params.min_pts = 3;
    auto [e1, f1] = build(pts);
    auto lab1 = dbscan(e1, f1, params);

    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto [e2, f2] = build(shuffled);
    auto lab2 = dbscan(e2, f2, params);

    CHECK(lab1.num_instances == lab2.num_instances);
    // compare partitions as multisets of embedding-point clusters
    auto cluster_sets = [&](const InstanceLabeling& lab,
                            const std::vector<std::pair<float, float>>& order) {
        std::vector<std::vector<std::pair<float, float>>> sets(lab.num_instances);
        for (size_t i = 0; i < order.size(); ++i) {
            int id = lab.labels[i];
            if (id > 0) sets[id - 1].push_back(order[i]);
        }
        for (auto& s : sets) std::sort(s.begin(), s.end());
        std::sort(sets.begin(), sets.end());
        return sets;
    };
    CHECK(cluster_sets(lab1, pts) == cluster_sets(lab2, shuffled));
}

TEST_CASE("match_instances: identical labelings match perfectly") {
    auto lab = oracles::random_labeling(6, 6, 3, 21);
    auto m = match_instances(lab, lab, 0.5);
    CHECK(m.pairs.size() == 3);
    for (double iou : m.ious) CHECK(iou == doctest::Approx(1.0));
    CHECK(m.unmatched_pred.empty());
    CHECK(m.unmatched_gt.empty());
}

TEST_CASE("match_instances: empty prediction leaves all gt unmatched") {
    auto gt = oracles::random_labeling(5, 5, 2, 22);
    InstanceLabeling pred(5, 5, 0, std::vector<uint16_t>(25, 0));
    auto m = match_instances(pred, gt, 0.5);
    CHECK(m.pairs.empty());
    CHECK(m.unmatched_gt.size() == 2);
}

TEST_CASE("match_instances: pred overlapping two gts takes the larger IoU") {
    // 3x3: pred instance covers the left 2 columns; gt 1 = column 0,
    // gt 2 = columns 1..2
    InstanceLabeling pred(3, 3, 1, {1, 1, 0, 1, 1, 0, 1, 1, 0});
    InstanceLabeling gt(3, 3, 2, {1, 2, 2, 1, 2, 2, 1, 2, 2});
    auto m = match_instances(pred, gt, 0.1);
    REQUIRE(m.pairs.size() == 1);
    // IoU(pred, gt1) = 3/6 = 0.5; IoU(pred, gt2) = 3/9 = 0.333
    CHECK(m.pairs[0] == std::pair{1, 1});
    CHECK(m.ious[0] == doctest::Approx(0.5));
    CHECK(m.unmatched_gt == std::vector<int>{2});
}
