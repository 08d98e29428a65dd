// Direct gradient-based fitting of offset/sigma/seed fields to a labeling.
//
// sigma = exp(sigma_logit) and seed = logistic(seed_logit), so positivity and
// the (0,1) range hold by parametrization after every step.

#pragma once

#include <utility>
#include <vector>

#include "lanemb/field.hpp"
#include "lanemb/losses.hpp"

namespace lanemb {

struct FieldState {
    FieldF32 offsets_raw;  // 2 channels, pixels
    FieldF32 sigma_logit;  // 1 channel
    FieldF32 seed_logit;   // 1 channel

    // Heavy-ball velocity, carried between steps. Not part of checkpoints.
    FieldF32 vel_offsets, vel_sigma, vel_seed;

    FieldF32 sigma() const;      // exp(sigma_logit)
    FieldF32 seed() const;       // logistic(seed_logit)
    FieldF32 offsets() const { return offsets_raw; }
};

struct FitConfig {
    // Tuned jointly with LossConfig::w_b so that per-scene fitting converges
    // on both small blobs and 128-row lanes; gradients are averaged per pixel
    // and per instance, hence the large raw step size.
    double step_size = 120.0;
    double momentum = 0.95;
    int max_steps = 2000;
    double stop_tolerance = 0.0;  // on L-inf of the raw-parameter gradient
    uint64_t rng_seed = 0;        // reserved; init is deterministic
    LossConfig loss;

    void validate() const;
};

FieldState init_state(const InstanceLabeling& labeling, const FitConfig& cfg);

// One heavy-ball update: v <- g + momentum*v; p <- p - step_size*v.
// Returns the new state and the pre-step LossReport.
// Throws std::runtime_error naming the offending field on non-finite gradients.
std::pair<FieldState, LossReport> step(const FieldState& state,
                                       const InstanceLabeling& labeling,
                                       const FitConfig& cfg);

std::pair<FieldState, std::vector<LossReport>> fit(const InstanceLabeling& labeling,
                                                   const FitConfig& cfg);

}  // namespace lanemb
