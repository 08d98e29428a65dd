#include <cstdlib>

#include "lanemb/kernels.hpp"

namespace lanemb::kernels {

namespace {

struct Backend {
    void (*add)(const float*, const float*, float*, size_t);
    void (*axpy)(float, const float*, float*, size_t);
    void (*mark_within_radius)(const float*, const float*, size_t,
                               float, float, float, uint8_t*);
    const char* name;
};

Backend pick_backend() {
    const char* force = std::getenv("LANEMB_FORCE_SCALAR");
    bool forced_scalar = force && force[0] == '1';
#if defined(__x86_64__)
    if (!forced_scalar && __builtin_cpu_supports("avx2"))
        return {avx2::add, avx2::axpy, avx2::mark_within_radius, "avx2"};
#else
    (void)forced_scalar;
#endif
    return {scalar::add, scalar::axpy, scalar::mark_within_radius, "scalar"};
}

const Backend& backend() {
    static const Backend b = pick_backend();
    return b;
}

}  // namespace

void add(const float* a, const float* b, float* out, size_t n) {
    backend().add(a, b, out, n);
}

void axpy(float alpha, const float* x, float* y, size_t n) {
    backend().axpy(alpha, x, y, n);
}

void mark_within_radius(const float* ex, const float* ey, size_t n,
                        float cx, float cy, float r2, uint8_t* hit) {
    backend().mark_within_radius(ex, ey, n, cx, cy, r2, hit);
}

const char* active_backend() { return backend().name; }

}  // namespace lanemb::kernels
