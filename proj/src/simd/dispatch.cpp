#include <atomic>
#include <cstdlib>
#include <string_view>

#include "friendsim/simd/kernels.hpp"

namespace friendsim::simd {

#if defined(FRIENDSIM_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

bool cpu_supports_avx2_fma() {
#if defined(FRIENDSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(FRIENDSIM_HAVE_AVX2)
    static const bool ok = cpu_supports_avx2_fma();
    return ok ? &avx2_kernel_table() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* detect() {
    if (const char* env = std::getenv("FRIENDSIM_ISA"); env != nullptr && std::string_view(env) == "scalar") {
        return &scalar_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) {
        return t;
    }
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{detect()};
    return current;
}

}  // namespace

const KernelTable& active_kernels() { return *slot().load(std::memory_order_acquire); }

bool select_isa(Isa isa) {
    const KernelTable* t = isa == Isa::Scalar ? &scalar_kernels() : avx2_kernels();
    if (t == nullptr) {
        return false;
    }
    slot().store(t, std::memory_order_release);
    return true;
}

}  // namespace friendsim::simd
