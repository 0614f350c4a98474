#pragma once

#include "palis/simd/kernels.hpp"

namespace palis::simd {

const Kernels& scalar_kernels();
/// Null when the translation unit was built without AVX2 support.
const Kernels* avx2_kernels();

}  // namespace palis::simd
