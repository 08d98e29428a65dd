#include "lanemb/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lanemb/kernels.hpp"

namespace lanemb {

void FitConfig::validate() const {
    if (!(step_size >= 0.0)) throw std::domain_error("FitConfig: step_size must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::domain_error("FitConfig: momentum must be in [0,1)");
    if (max_steps < 1) throw std::domain_error("FitConfig: max_steps must be >= 1");
    if (stop_tolerance < 0.0) throw std::domain_error("FitConfig: stop_tolerance must be >= 0");
    loss.validate();
}

FieldF32 FieldState::sigma() const {
    FieldF32 s = sigma_logit;
    for (float& v : s.data) v = std::exp(v);
    return s;
}

FieldF32 FieldState::seed() const {
    FieldF32 s = seed_logit;
    for (float& v : s.data) v = 1.0f / (1.0f + std::exp(-v));
    return s;
}

FieldState init_state(const InstanceLabeling& labeling, const FitConfig& cfg) {
    cfg.validate();
    const int h = labeling.height, w = labeling.width;
    FieldState st;
    st.offsets_raw = FieldF32(h, w, 2, 0.0f);
    st.sigma_logit = FieldF32(h, w, 1, 0.0f);  // sigma0 = 1 px
    st.seed_logit = FieldF32(h, w, 1, static_cast<float>(std::log(0.01 / 0.99)));
    st.vel_offsets = FieldF32(h, w, 2, 0.0f);
    st.vel_sigma = FieldF32(h, w, 1, 0.0f);
    st.vel_seed = FieldF32(h, w, 1, 0.0f);
    return st;
}

namespace {

// v <- g + momentum*v; p <- p - step*v
void heavy_ball(FieldF32& param, FieldF32& vel, const FieldF32& grad,
                float step, float momentum) {
    const size_t n = vel.data.size();
    for (size_t i = 0; i < n; ++i)
        vel.data[i] = grad.data[i] + momentum * vel.data[i];
    kernels::axpy(-step, vel.data.data(), param.data.data(), n);
}

}  // namespace

std::pair<FieldState, LossReport> step(const FieldState& state,
                                       const InstanceLabeling& labeling,
                                       const FitConfig& cfg) {
    cfg.validate();
    FieldF32 sigma = state.sigma();
    FieldF32 seed = state.seed();
    auto result = total_loss_and_gradients(state.offsets_raw, sigma, seed, labeling, cfg.loss);

    // Chain rule through the parametrizations: dsigma/dlogit = sigma,
    // dseed/dlogit = seed*(1-seed).
    FieldF32 g_sigma_logit = result.grads.d_sigma;
    FieldF32 g_seed_logit = result.grads.d_seed;
    for (size_t i = 0; i < g_sigma_logit.data.size(); ++i) {
        g_sigma_logit.data[i] *= sigma.data[i];
        g_seed_logit.data[i] *= seed.data[i] * (1.0f - seed.data[i]);
    }

    if (!result.grads.d_offsets.all_finite())
        throw std::runtime_error("step: non-finite gradient in field 'offsets'");
    if (!g_sigma_logit.all_finite())
        throw std::runtime_error("step: non-finite gradient in field 'sigma'");
    if (!g_seed_logit.all_finite())
        throw std::runtime_error("step: non-finite gradient in field 'seed'");

    FieldState next = state;
    float step_size = static_cast<float>(cfg.step_size);
    float momentum = static_cast<float>(cfg.momentum);
    heavy_ball(next.offsets_raw, next.vel_offsets, result.grads.d_offsets, step_size, momentum);
    heavy_ball(next.sigma_logit, next.vel_sigma, g_sigma_logit, step_size, momentum);
    heavy_ball(next.seed_logit, next.vel_seed, g_seed_logit, step_size, momentum);

    // Clamp the logits so exp/logistic cannot underflow to 0 or saturate to 1
    // in float; keeps sigma strictly positive and seed strictly inside (0,1).
    static constexpr float kLogitClamp = 15.0f;
    auto clamp_field = [](FieldF32& f) {
        for (float& v : f.data) v = std::clamp(v, -kLogitClamp, kLogitClamp);
    };
    clamp_field(next.sigma_logit);
    clamp_field(next.seed_logit);

    // Report the raw-parameter gradient norms seen by the update.
    LossReport rep = result.report;
    auto inf_norm = [](const FieldF32& f) {
        float m = 0.0f;
        for (float v : f.data) m = std::max(m, std::abs(v));
        return static_cast<double>(m);
    };
    rep.grad_inf_sigma = inf_norm(g_sigma_logit);
    rep.grad_inf_seed = inf_norm(g_seed_logit);
    return {std::move(next), rep};
}

std::pair<FieldState, std::vector<LossReport>> fit(const InstanceLabeling& labeling,
                                                   const FitConfig& cfg) {
    cfg.validate();
    FieldState state = init_state(labeling, cfg);
    std::vector<LossReport> trajectory;
    trajectory.reserve(cfg.max_steps);
    for (int i = 0; i < cfg.max_steps; ++i) {
        auto [next, report] = step(state, labeling, cfg);
        trajectory.push_back(report);
        state = std::move(next);
        double gmax = std::max({report.grad_inf_offsets, report.grad_inf_sigma,
                                report.grad_inf_seed});
        if (gmax <= cfg.stop_tolerance) break;
    }
    return {std::move(state), std::move(trajectory)};
}

}  // namespace lanemb
