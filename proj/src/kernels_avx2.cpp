// AVX2 variants. Compiled with -mavx2 and -ffp-contract=off; every lane does
// exactly the scalar op sequence (sub, mul, mul, add), so results are
// bit-identical to the scalar kernels.

#if defined(__x86_64__)

#include <immintrin.h>

#include "lanemb/kernels.hpp"

namespace lanemb::kernels::avx2 {

void add(const float* a, const float* b, float* out, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        __m256 vb = _mm256_loadu_ps(b + i);
        _mm256_storeu_ps(out + i, _mm256_add_ps(va, vb));
    }
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void axpy(float alpha, const float* x, float* y, size_t n) {
    __m256 va = _mm256_set1_ps(alpha);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vx = _mm256_loadu_ps(x + i);
        __m256 vy = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(y + i, _mm256_add_ps(vy, _mm256_mul_ps(va, vx)));
    }
    for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void mark_within_radius(const float* ex, const float* ey, size_t n,
                        float cx, float cy, float r2, uint8_t* hit) {
    __m256 vcx = _mm256_set1_ps(cx);
    __m256 vcy = _mm256_set1_ps(cy);
    __m256 vr2 = _mm256_set1_ps(r2);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 dx = _mm256_sub_ps(_mm256_loadu_ps(ex + i), vcx);
        __m256 dy = _mm256_sub_ps(_mm256_loadu_ps(ey + i), vcy);
        __m256 d2 = _mm256_add_ps(_mm256_mul_ps(dx, dx), _mm256_mul_ps(dy, dy));
        int mask = _mm256_movemask_ps(_mm256_cmp_ps(d2, vr2, _CMP_LE_OQ));
        for (int j = 0; j < 8; ++j) hit[i + j] = (mask >> j) & 1;
    }
    for (; i < n; ++i) {
        float dx = ex[i] - cx;
        float dy = ey[i] - cy;
        float dxx = dx * dx;
        float dyy = dy * dy;
        hit[i] = (dxx + dyy) <= r2 ? 1 : 0;
    }
}

}  // namespace lanemb::kernels::avx2

#endif  // __x86_64__
