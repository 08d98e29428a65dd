// Training losses on embedding, bandwidth, seed and centroid fields, with
// closed-form values and analytic gradients wrt the offset, sigma and seed maps.
//
// Public entry points take FieldF32; the arithmetic runs in double internally
// (namespace f64) so finite-difference verification is stable.

#pragma once

#include <string>
#include <vector>

#include "lanemb/core.hpp"
#include "lanemb/field.hpp"

namespace lanemb {

struct LossConfig {
    double prob_threshold = 0.5;  // Pr
    double delta_margin = 4.0;    // pixels
    double delta_push = 8.0;      // pixels
    double w_e = 1.0;
    // Small bandwidth weight so sigma can first grow to reach every pixel of a
    // long thin instance and is only then annealed back to the delta_margin
    // knee; larger weights cap sigma too early and strand distant pixels with
    // vanishing affinity gradients.
    double w_b = 0.003;
    double w_d = 0.1;
    double w_s = 1.0;

    void validate() const;
};

struct LossReport {
    double total = 0.0;
    double loss_embedding = 0.0;
    double loss_bandwidth = 0.0;
    double loss_push = 0.0;
    double loss_seed = 0.0;
    double grad_inf_offsets = 0.0;
    double grad_inf_sigma = 0.0;
    double grad_inf_seed = 0.0;
};

struct Gradients {
    FieldF32 d_offsets;  // 2 channels
    FieldF32 d_sigma;    // 1 channel
    FieldF32 d_seed;     // 1 channel
};

// phi_k(e_i) = exp(-|e_i - C_k|^2 / (2 sigma_k^2)); sigma_k > 0.
double gaussian_affinity(double ex, double ey, double cx, double cy, double sigma_k);

// Radius at which the affinity crosses Pr: sqrt(-2 sigma_k^2 ln Pr).
double margin(double sigma_k, double prob_threshold);

double embedding_loss(const EmbeddingField& embedding, const FieldF32& sigma,
                      const InstanceLabeling& labeling, const LossConfig& cfg);
double bandwidth_saturation_loss(const InstanceStats& stats, const LossConfig& cfg);
double push_loss(const InstanceStats& stats, const LossConfig& cfg);
double seed_loss(const FieldF32& seed, const EmbeddingField& embedding,
                 const FieldF32& sigma, const InstanceLabeling& labeling,
                 const LossConfig& cfg);

struct TotalLossResult {
    LossReport report;
    Gradients grads;
};

// Gradients flow through e_i, through C_k (mean of embeddings) and through
// sigma_k (mean of sigma_i). Seed-loss targets are detached: L_s contributes
// gradient only to the seed field.
TotalLossResult total_loss_and_gradients(const FieldF32& offsets, const FieldF32& sigma,
                                         const FieldF32& seed,
                                         const InstanceLabeling& labeling,
                                         const LossConfig& cfg);

// Double-precision working representation, used by the wrappers above and by
// the finite-difference verification paths.
namespace f64 {

struct Params {
    int height = 0;
    int width = 0;
    std::vector<double> off_x, off_y, sigma, seed;  // row-major, one per pixel

    static Params from_fields(const FieldF32& offsets, const FieldF32& sigma,
                              const FieldF32& seed);
};

struct Stats {
    std::vector<double> cx, cy, sigma_mean;
    std::vector<size_t> count;
};

Stats stats_of(const Params& p, const InstanceLabeling& lab);

double embedding_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg);
double bandwidth_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg);
double push_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg);
// frozen_targets, when given, replaces the phi targets computed from p
// (detached-target semantics for differentiation wrt offsets/sigma).
double seed_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg,
                 const std::vector<double>* frozen_targets = nullptr);
std::vector<double> seed_targets(const Params& p, const InstanceLabeling& lab);

double total_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg,
                  const std::vector<double>* frozen_targets = nullptr);

struct GradientsD {
    std::vector<double> d_off_x, d_off_y, d_sigma, d_seed;
};

struct TotalD {
    LossReport report;
    GradientsD grads;
};

TotalD total_with_gradients(const Params& p, const InstanceLabeling& lab,
                            const LossConfig& cfg);

}  // namespace f64

}  // namespace lanemb
