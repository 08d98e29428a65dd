// Post-processing: greedy seed-then-mask clustering and a DBSCAN baseline.

#pragma once

#include <vector>

#include "lanemb/core.hpp"
#include "lanemb/field.hpp"

namespace lanemb {

struct ClusterParams {
    double seed_threshold = 0.5;
    double prob_threshold = 0.5;  // Pr
    int max_instances = 16;
    int min_pixels = 8;

    void validate() const;
};

struct DbscanParams {
    double eps = 2.0;   // pixels, in embedding space
    int min_pts = 3;

    void validate() const;
};

// Repeatedly takes the unassigned foreground pixel of maximal seed score
// (ties: smallest row-major index), centers a Gaussian at its embedding with
// its sigma, and claims every unassigned pixel with affinity >= Pr.
// Instances smaller than min_pixels dissolve back to background.
InstanceLabeling fast_cluster(const EmbeddingField& embedding, const FieldF32& sigma,
                              const FieldF32& seed, const Mask& fg_mask,
                              const ClusterParams& params);

// Classical DBSCAN over the 2-D embedding points of foreground pixels, with a
// uniform grid index of cell size eps. Noise stays label 0; cluster ids are
// assigned in discovery order.
InstanceLabeling dbscan(const EmbeddingField& embedding, const Mask& fg_mask,
                        const DbscanParams& params);

struct InstanceMatching {
    std::vector<std::pair<int, int>> pairs;  // (pred id, gt id)
    std::vector<double> ious;                // parallel to pairs
    std::vector<int> unmatched_pred;
    std::vector<int> unmatched_gt;
};

// Greedy matching by descending pairwise IoU; a pair is accepted only if
// IoU >= iou_threshold and both sides are still unmatched.
InstanceMatching match_instances(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                 double iou_threshold);

}  // namespace lanemb
