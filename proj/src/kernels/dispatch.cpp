#include <atomic>
#include <cstdlib>
#include <string_view>

#include "internal.hpp"

namespace ccsemi::kernels {
namespace {

const KernelSet* probe_avx2() {
#if defined(CCSEMI_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &detail::avx2_kernel_set();
#endif
    return nullptr;
}

const KernelSet* initial_selection() {
    if (const char* env = std::getenv("CCSEMI_KERNELS"); env && std::string_view(env) == "scalar")
        return &scalar_kernels();
    if (const KernelSet* fast = avx2_kernels()) return fast;
    return &scalar_kernels();
}

std::atomic<const KernelSet*>& selection() {
    static std::atomic<const KernelSet*> current{initial_selection()};
    return current;
}

}  // namespace

const KernelSet* avx2_kernels() {
    static const KernelSet* const probed = probe_avx2();
    return probed;
}

const KernelSet& active() { return *selection().load(std::memory_order_acquire); }

void set_active(const KernelSet& set) { selection().store(&set, std::memory_order_release); }

}  // namespace ccsemi::kernels
