#include "lanemb/kernels.hpp"

namespace lanemb::kernels::scalar {

void add(const float* a, const float* b, float* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void axpy(float alpha, const float* x, float* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void mark_within_radius(const float* ex, const float* ey, size_t n,
                        float cx, float cy, float r2, uint8_t* hit) {
    for (size_t i = 0; i < n; ++i) {
        float dx = ex[i] - cx;
        float dy = ey[i] - cy;
        float dxx = dx * dx;
        float dyy = dy * dy;
        hit[i] = (dxx + dyy) <= r2 ? 1 : 0;
    }
}

}  // namespace lanemb::kernels::scalar
