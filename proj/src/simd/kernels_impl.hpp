// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "geoagent/simd/kernels.hpp"

namespace geoagent::simd::detail {

extern const KernelTable kScalarTable;

#if defined(GEOAGENT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

} // namespace geoagent::simd::detail
