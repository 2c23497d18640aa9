#pragma once

// Internal: per-ISA tables. Only the dispatcher includes this.

#include "ctxsal/simd/kernels.hpp"

namespace ctxsal::simd::detail {

#if defined(CTXSAL_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

#if defined(CTXSAL_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

}  // namespace ctxsal::simd::detail
