#include "lanemb/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lanemb/lovasz.hpp"

namespace lanemb {

void LossConfig::validate() const {
    if (!(prob_threshold > 0.0 && prob_threshold < 1.0))
        throw std::domain_error("LossConfig: prob_threshold must be in (0,1)");
    if (!(delta_margin > 0.0)) throw std::domain_error("LossConfig: delta_margin must be > 0");
    if (!(delta_push > 0.0)) throw std::domain_error("LossConfig: delta_push must be > 0");
    if (w_e < 0 || w_b < 0 || w_d < 0 || w_s < 0)
        throw std::domain_error("LossConfig: weights must be nonnegative");
}

double gaussian_affinity(double ex, double ey, double cx, double cy, double sigma_k) {
    if (!(sigma_k > 0.0)) throw std::domain_error("gaussian_affinity: sigma must be > 0");
    double dx = ex - cx, dy = ey - cy;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_k * sigma_k));
}

double margin(double sigma_k, double prob_threshold) {
    if (!(sigma_k > 0.0)) throw std::domain_error("margin: sigma must be > 0");
    if (!(prob_threshold > 0.0 && prob_threshold < 1.0))
        throw std::domain_error("margin: prob threshold must be in (0,1)");
    return std::sqrt(-2.0 * sigma_k * sigma_k * std::log(prob_threshold));
}

namespace f64 {

Params Params::from_fields(const FieldF32& offsets, const FieldF32& sigma,
                           const FieldF32& seed) {
    if (offsets.channels != 2 || sigma.channels != 1 || seed.channels != 1 ||
        offsets.height != sigma.height || offsets.width != sigma.width ||
        offsets.height != seed.height || offsets.width != seed.width)
        throw std::invalid_argument("Params::from_fields: shape mismatch");
    Params p;
    p.height = offsets.height;
    p.width = offsets.width;
    size_t n = static_cast<size_t>(p.height) * p.width;
    p.off_x.resize(n);
    p.off_y.resize(n);
    p.sigma.resize(n);
    p.seed.resize(n);
    for (size_t i = 0; i < n; ++i) {
        p.off_x[i] = offsets.data[2 * i];
        p.off_y[i] = offsets.data[2 * i + 1];
        p.sigma[i] = sigma.data[i];
        p.seed[i] = seed.data[i];
    }
    return p;
}

namespace {

void check_shape(const Params& p, const InstanceLabeling& lab) {
    if (p.height != lab.height || p.width != lab.width)
        throw std::invalid_argument("losses: params / labeling shape mismatch");
}

// Embedding of pixel i under the pixel-center convention.
inline double emb_x(const Params& p, size_t i) {
    return (i % p.width) + 0.5 + p.off_x[i];
}
inline double emb_y(const Params& p, size_t i) {
    return (i / p.width) + 0.5 + p.off_y[i];
}

std::vector<size_t> foreground_indices(const InstanceLabeling& lab) {
    std::vector<size_t> fg;
    for (size_t i = 0; i < lab.labels.size(); ++i)
        if (lab.labels[i] > 0) fg.push_back(i);
    return fg;
}

std::vector<std::vector<size_t>> instance_members(const InstanceLabeling& lab) {
    std::vector<std::vector<size_t>> m(lab.num_instances);
    for (size_t i = 0; i < lab.labels.size(); ++i)
        if (lab.labels[i] > 0) m[lab.labels[i] - 1].push_back(i);
    return m;
}

}  // namespace

Stats stats_of(const Params& p, const InstanceLabeling& lab) {
    check_shape(p, lab);
    const int k = lab.num_instances;
    Stats s;
    s.cx.assign(k, 0.0);
    s.cy.assign(k, 0.0);
    s.sigma_mean.assign(k, 0.0);
    s.count.assign(k, 0);
    for (size_t i = 0; i < lab.labels.size(); ++i) {
        int id = lab.labels[i];
        if (id == 0) continue;
        if (!(p.sigma[i] > 0.0))
            throw std::domain_error("losses: sigma <= 0 on foreground pixel");
        s.cx[id - 1] += emb_x(p, i);
        s.cy[id - 1] += emb_y(p, i);
        s.sigma_mean[id - 1] += p.sigma[i];
        s.count[id - 1] += 1;
    }
    for (int j = 0; j < k; ++j) {
        double n = static_cast<double>(s.count[j]);
        s.cx[j] /= n;
        s.cy[j] /= n;
        s.sigma_mean[j] /= n;
    }
    return s;
}

double embedding_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg) {
    cfg.validate();
    check_shape(p, lab);
    if (lab.num_instances < 1) throw std::domain_error("embedding_loss: K must be >= 1");
    auto fg = foreground_indices(lab);
    if (fg.empty()) throw std::domain_error("embedding_loss: no foreground pixels");

    Stats st = stats_of(p, lab);
    const int k = lab.num_instances;
    double total = 0.0;
    std::vector<double> scores(fg.size());
    std::vector<int> labels(fg.size());
    for (int inst = 0; inst < k; ++inst) {
        double s2 = 2.0 * st.sigma_mean[inst] * st.sigma_mean[inst];
        for (size_t j = 0; j < fg.size(); ++j) {
            size_t i = fg[j];
            double dx = emb_x(p, i) - st.cx[inst];
            double dy = emb_y(p, i) - st.cy[inst];
            double phi = std::exp(-(dx * dx + dy * dy) / s2);
            scores[j] = 2.0 * phi - 1.0;
            labels[j] = (lab.labels[i] == inst + 1) ? 1 : 0;
        }
        total += lovasz_hinge(scores, labels);
    }
    return total / k;
}

double bandwidth_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg) {
    cfg.validate();
    Stats st = stats_of(p, lab);
    const int k = lab.num_instances;
    double total = 0.0;
    for (int inst = 0; inst < k; ++inst)
        total += std::max(margin(st.sigma_mean[inst], cfg.prob_threshold) - cfg.delta_margin, 0.0);
    return total / k;
}

double push_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg) {
    cfg.validate();
    Stats st = stats_of(p, lab);
    const int k = lab.num_instances;
    if (k <= 1) return 0.0;
    double total = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b) continue;
            double dx = st.cx[a] - st.cx[b];
            double dy = st.cy[a] - st.cy[b];
            double d = std::sqrt(dx * dx + dy * dy);
            double h = std::max(0.0, 2.0 * cfg.delta_push - d);
            total += h * h;
        }
    return total / (static_cast<double>(k) * (k - 1));
}

std::vector<double> seed_targets(const Params& p, const InstanceLabeling& lab) {
    Stats st = stats_of(p, lab);
    std::vector<double> t(lab.labels.size(), 0.0);
    for (size_t i = 0; i < lab.labels.size(); ++i) {
        int id = lab.labels[i];
        if (id == 0) continue;
        double sm = st.sigma_mean[id - 1];
        double dx = emb_x(p, i) - st.cx[id - 1];
        double dy = emb_y(p, i) - st.cy[id - 1];
        t[i] = std::exp(-(dx * dx + dy * dy) / (2.0 * sm * sm));
    }
    return t;
}

double seed_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg,
                 const std::vector<double>* frozen_targets) {
    cfg.validate();
    check_shape(p, lab);
    std::vector<double> computed;
    const std::vector<double>* t = frozen_targets;
    if (!t) {
        computed = seed_targets(p, lab);
        t = &computed;
    }
    double total = 0.0;
    for (size_t i = 0; i < p.seed.size(); ++i) {
        double r = p.seed[i] - (*t)[i];
        total += r * r;
    }
    return total / static_cast<double>(p.seed.size());
}

double total_loss(const Params& p, const InstanceLabeling& lab, const LossConfig& cfg,
                  const std::vector<double>* frozen_targets) {
    double le = cfg.w_e > 0 ? embedding_loss(p, lab, cfg) : 0.0;
    double lb = cfg.w_b > 0 ? bandwidth_loss(p, lab, cfg) : 0.0;
    double ld = cfg.w_d > 0 ? push_loss(p, lab, cfg) : 0.0;
    double ls = cfg.w_s > 0 ? seed_loss(p, lab, cfg, frozen_targets) : 0.0;
    return cfg.w_e * le + cfg.w_b * lb + cfg.w_d * ld + cfg.w_s * ls;
}

TotalD total_with_gradients(const Params& p, const InstanceLabeling& lab,
                            const LossConfig& cfg) {
    cfg.validate();
    check_shape(p, lab);
    if (lab.num_instances < 1) throw std::domain_error("total_loss: K must be >= 1");
    auto fg = foreground_indices(lab);
    if (fg.empty()) throw std::domain_error("total_loss: no foreground pixels");

    const int k = lab.num_instances;
    const size_t npix = lab.labels.size();
    Stats st = stats_of(p, lab);
    auto members = instance_members(lab);

    TotalD out;
    out.grads.d_off_x.assign(npix, 0.0);
    out.grads.d_off_y.assign(npix, 0.0);
    out.grads.d_sigma.assign(npix, 0.0);
    out.grads.d_seed.assign(npix, 0.0);

    // --- embedding loss ---
    double le = 0.0;
    {
        std::vector<double> scores(fg.size()), phis(fg.size());
        std::vector<int> labels(fg.size());
        for (int inst = 0; inst < k; ++inst) {
            double sm = st.sigma_mean[inst];
            double s2 = 2.0 * sm * sm;
            for (size_t j = 0; j < fg.size(); ++j) {
                size_t i = fg[j];
                double dx = emb_x(p, i) - st.cx[inst];
                double dy = emb_y(p, i) - st.cy[inst];
                phis[j] = std::exp(-(dx * dx + dy * dy) / s2);
                scores[j] = 2.0 * phis[j] - 1.0;
                labels[j] = (lab.labels[i] == inst + 1) ? 1 : 0;
            }
            le += lovasz_hinge(scores, labels);
            if (cfg.w_e == 0.0) continue;

            auto gscore = lovasz_hinge_grad(scores, labels);
            double scale = cfg.w_e / k;
            double gcx = 0.0, gcy = 0.0, gsm = 0.0;
            double inv_s2 = 1.0 / (sm * sm);
            size_t nk = st.count[inst];
            for (size_t j = 0; j < fg.size(); ++j) {
                if (gscore[j] == 0.0) continue;
                size_t i = fg[j];
                double a = scale * gscore[j] * 2.0;  // dL/dphi
                double dx = emb_x(p, i) - st.cx[inst];
                double dy = emb_y(p, i) - st.cy[inst];
                double common = a * phis[j] * inv_s2;
                out.grads.d_off_x[i] -= common * dx;
                out.grads.d_off_y[i] -= common * dy;
                gcx += common * dx;
                gcy += common * dy;
                gsm += a * phis[j] * (dx * dx + dy * dy) / (sm * sm * sm);
            }
            for (size_t j : members[inst]) {
                out.grads.d_off_x[j] += gcx / nk;
                out.grads.d_off_y[j] += gcy / nk;
                out.grads.d_sigma[j] += gsm / nk;
            }
        }
        le /= k;
    }

    // --- bandwidth saturation loss ---
    double lb = 0.0;
    {
        double root = std::sqrt(-2.0 * std::log(cfg.prob_threshold));
        for (int inst = 0; inst < k; ++inst) {
            double m = st.sigma_mean[inst] * root;
            double h = m - cfg.delta_margin;
            if (h > 0.0) {
                lb += h;
                double g = cfg.w_b / k * root / st.count[inst];
                for (size_t j : members[inst]) out.grads.d_sigma[j] += g;
            }
        }
        lb /= k;
    }

    // --- push loss ---
    double ld = 0.0;
    if (k > 1) {
        double norm = 1.0 / (static_cast<double>(k) * (k - 1));
        for (int a = 0; a < k; ++a) {
            double gcx = 0.0, gcy = 0.0;
            for (int b = 0; b < k; ++b) {
                if (a == b) continue;
                double dx = st.cx[a] - st.cx[b];
                double dy = st.cy[a] - st.cy[b];
                double d = std::sqrt(dx * dx + dy * dy);
                double h = 2.0 * cfg.delta_push - d;
                if (h <= 0.0) continue;
                ld += h * h;
                if (d > 0.0) {
                    // ordered pair (a,b): d/dC_a of h^2 = -2h * (C_a-C_b)/d,
                    // but (b,a) contributes the same to C_a, handled when the
                    // outer loop reaches it; here only the (a,b) share.
                    double coeff = cfg.w_d * norm * 2.0 * h / d;
                    gcx -= coeff * dx;
                    gcy -= coeff * dy;
                }
            }
            // the symmetric (b,a) term doubles C_a's gradient
            gcx *= 2.0;
            gcy *= 2.0;
            double nk = static_cast<double>(st.count[a]);
            for (size_t j : members[a]) {
                out.grads.d_off_x[j] += gcx / nk;
                out.grads.d_off_y[j] += gcy / nk;
            }
        }
        ld *= norm;  // ld accumulated over ordered pairs exactly once each
    }

    // --- seed loss (targets detached) ---
    double ls = 0.0;
    {
        auto targets = seed_targets(p, lab);
        double invn = 1.0 / static_cast<double>(npix);
        for (size_t i = 0; i < npix; ++i) {
            double r = p.seed[i] - targets[i];
            ls += r * r;
            out.grads.d_seed[i] = cfg.w_s * 2.0 * r * invn;
        }
        ls *= invn;
    }

    for (double v : out.grads.d_off_x)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite gradient: offsets");
    for (double v : out.grads.d_sigma)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite gradient: sigma");

    out.report.loss_embedding = le;
    out.report.loss_bandwidth = lb;
    out.report.loss_push = ld;
    out.report.loss_seed = ls;
    out.report.total = cfg.w_e * le + cfg.w_b * lb + cfg.w_d * ld + cfg.w_s * ls;
    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    out.report.grad_inf_offsets =
        std::max(inf_norm(out.grads.d_off_x), inf_norm(out.grads.d_off_y));
    out.report.grad_inf_sigma = inf_norm(out.grads.d_sigma);
    out.report.grad_inf_seed = inf_norm(out.grads.d_seed);
    return out;
}

}  // namespace f64

namespace {

f64::Params params_from_embedding(const EmbeddingField& embedding, const FieldF32& sigma,
                                  const FieldF32* seed) {
    const FieldF32& e = embedding.e;
    if (e.channels != 2 || sigma.channels != 1 || e.height != sigma.height ||
        e.width != sigma.width)
        throw std::invalid_argument("losses: shape mismatch");
    f64::Params p;
    p.height = e.height;
    p.width = e.width;
    size_t n = static_cast<size_t>(e.height) * e.width;
    p.off_x.resize(n);
    p.off_y.resize(n);
    p.sigma.resize(n);
    p.seed.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double cx = (i % p.width) + 0.5;
        double cy = (i / p.width) + 0.5;
        p.off_x[i] = e.data[2 * i] - cx;
        p.off_y[i] = e.data[2 * i + 1] - cy;
        p.sigma[i] = sigma.data[i];
    }
    if (seed) {
        if (seed->channels != 1 || seed->height != e.height || seed->width != e.width)
            throw std::invalid_argument("losses: seed shape mismatch");
        for (size_t i = 0; i < n; ++i) p.seed[i] = seed->data[i];
    }
    return p;
}

}  // namespace

double embedding_loss(const EmbeddingField& embedding, const FieldF32& sigma,
                      const InstanceLabeling& labeling, const LossConfig& cfg) {
    return f64::embedding_loss(params_from_embedding(embedding, sigma, nullptr), labeling, cfg);
}

double bandwidth_saturation_loss(const InstanceStats& stats, const LossConfig& cfg) {
    cfg.validate();
    const size_t k = stats.num_instances();
    double total = 0.0;
    for (size_t i = 0; i < k; ++i)
        total += std::max(margin(stats.sigma_mean[i], cfg.prob_threshold) - cfg.delta_margin, 0.0);
    return k ? total / static_cast<double>(k) : 0.0;
}

double push_loss(const InstanceStats& stats, const LossConfig& cfg) {
    cfg.validate();
    const size_t k = stats.num_instances();
    if (k <= 1) return 0.0;
    double total = 0.0;
    for (size_t a = 0; a < k; ++a)
        for (size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            double dx = stats.centroid_x[a] - stats.centroid_x[b];
            double dy = stats.centroid_y[a] - stats.centroid_y[b];
            double h = std::max(0.0, 2.0 * cfg.delta_push - std::sqrt(dx * dx + dy * dy));
            total += h * h;
        }
    return total / (static_cast<double>(k) * (k - 1));
}

double seed_loss(const FieldF32& seed, const EmbeddingField& embedding,
                 const FieldF32& sigma, const InstanceLabeling& labeling,
                 const LossConfig& cfg) {
    return f64::seed_loss(params_from_embedding(embedding, sigma, &seed), labeling, cfg);
}

TotalLossResult total_loss_and_gradients(const FieldF32& offsets, const FieldF32& sigma,
                                         const FieldF32& seed,
                                         const InstanceLabeling& labeling,
                                         const LossConfig& cfg) {
    auto p = f64::Params::from_fields(offsets, sigma, seed);
    auto r = f64::total_with_gradients(p, labeling, cfg);

    TotalLossResult out;
    out.report = r.report;
    out.grads.d_offsets = FieldF32(offsets.height, offsets.width, 2);
    out.grads.d_sigma = FieldF32(offsets.height, offsets.width, 1);
    out.grads.d_seed = FieldF32(offsets.height, offsets.width, 1);
    size_t n = r.grads.d_sigma.size();
    for (size_t i = 0; i < n; ++i) {
        out.grads.d_offsets.data[2 * i] = static_cast<float>(r.grads.d_off_x[i]);
        out.grads.d_offsets.data[2 * i + 1] = static_cast<float>(r.grads.d_off_y[i]);
        out.grads.d_sigma.data[i] = static_cast<float>(r.grads.d_sigma[i]);
        out.grads.d_seed.data[i] = static_cast<float>(r.grads.d_seed[i]);
    }
    return out;
}

}  // namespace lanemb
