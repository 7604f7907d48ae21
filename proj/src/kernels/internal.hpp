#pragma once

#include "ccsemi/kernels.hpp"

namespace ccsemi::kernels::detail {

#if defined(CCSEMI_BUILD_AVX2)
const KernelSet& avx2_kernel_set();
#endif

}  // namespace ccsemi::kernels::detail
