#pragma once

#include "sdnr/kernels.hpp"

namespace sdnr::kernels::detail {

extern const KernelTable scalar_table;
#if defined(SDNR_HAVE_AVX2_KERNELS)
extern const KernelTable avx2_table;
#endif
#if defined(SDNR_HAVE_NEON_KERNELS)
extern const KernelTable neon_table;
#endif

}  // namespace sdnr::kernels::detail
