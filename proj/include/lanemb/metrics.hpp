// TuSimple-style point metrics, instance-level clustering quality and the
// fast-cluster vs DBSCAN timing harness.

#pragma once

#include <vector>

#include "lanemb/cluster.hpp"
#include "lanemb/synth.hpp"

namespace lanemb {

struct EvalParams {
    double point_tolerance = 20.0;       // pixels; see scaled_tolerance
    double lane_accept_threshold = 0.85;
    double iou_threshold = 0.5;

    // TuSimple convention: 20 px at width 1280, scaled linearly.
    static double scaled_tolerance(int width) { return 20.0 * width / 1280.0; }
};

struct TuSimpleResult {
    double accuracy = 0.0;
    double fp_rate = 0.0;
    double fn_rate = 0.0;
};

struct QualityResult {
    double mean_iou = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct TimingReport {
    double fast_ms = 0.0;     // median over runs
    double dbscan_ms = 0.0;
    double speedup_ratio = 0.0;  // dbscan / fast
    int runs = 0;
    int warmups = 0;
};

// For each instance, mean column index per sampled row; rows without pixels
// are absent. Result is ordered by instance id.
std::vector<LanePoints> extract_pred_lanes(const InstanceLabeling& labeling,
                                           int row_stride);

// Greedy lane matching by per-lane point accuracy (fraction of gt rows where
// |x_pred - x_gt| <= tolerance); pairs below lane_accept_threshold count as
// FP + FN. accuracy = correct points of accepted pairs / total gt points.
TuSimpleResult tusimple_eval(const std::vector<LanePoints>& pred,
                             const std::vector<LanePoints>& gt,
                             const EvalParams& params);

QualityResult clustering_quality(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                 const EvalParams& params);

struct BenchInput {
    EmbeddingField embedding;
    FieldF32 sigma;
    FieldF32 seed;
    Mask fg_mask;
};

// Median wall-times after warmups. Before timing, asserts both methods yield
// the same partition (up to relabeling) on every input; throws
// std::runtime_error with a diagnostic otherwise.
TimingReport bench_clustering(const std::vector<BenchInput>& batch,
                              const ClusterParams& params,
                              const DbscanParams& dbscan_params,
                              int warmups = 3, int runs = 21);

// Idealized converged fields for a scene: embeddings collapsed onto instance
// centroids, constant sigma, seed = affinity. Used by benchmarks and the CLI.
BenchInput ideal_fields(const LaneScene& scene, double sigma_value = 1.0);

}  // namespace lanemb
