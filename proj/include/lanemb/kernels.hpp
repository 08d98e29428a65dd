// Data-parallel inner loops: scalar reference kernels plus AVX2 variants
// selected once at startup. Both variants compute bit-identical results
// (plain f32 mul/add, no FMA, no reassociation), which the kernel tests assert.

#pragma once

#include <cstddef>
#include <cstdint>

namespace lanemb::kernels {

namespace scalar {
void add(const float* a, const float* b, float* out, size_t n);
// y += alpha * x
void axpy(float alpha, const float* x, float* y, size_t n);
// hit[i] = (ex[i]-cx)^2 + (ey[i]-cy)^2 <= r2
void mark_within_radius(const float* ex, const float* ey, size_t n,
                        float cx, float cy, float r2, uint8_t* hit);
}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void add(const float* a, const float* b, float* out, size_t n);
void axpy(float alpha, const float* x, float* y, size_t n);
void mark_within_radius(const float* ex, const float* ey, size_t n,
                        float cx, float cy, float r2, uint8_t* hit);
}  // namespace avx2
#endif

// Dispatched entry points. Backend is picked once per process from CPUID;
// set LANEMB_FORCE_SCALAR=1 to pin the scalar path.
void add(const float* a, const float* b, float* out, size_t n);
void axpy(float alpha, const float* x, float* y, size_t n);
void mark_within_radius(const float* ex, const float* ey, size_t n,
                        float cx, float cy, float r2, uint8_t* hit);

const char* active_backend();  // "scalar" or "avx2"

}  // namespace lanemb::kernels
