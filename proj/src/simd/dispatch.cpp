#include <cstdlib>
#include <string>

#include "voicemark/simd/kernels.hpp"

namespace voicemark::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    case Isa::Scalar: break;
  }
  return "scalar";
}

bool is_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(VOICEMARK_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(VOICEMARK_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) noexcept {
  if (!is_available(isa)) return detail::kScalarKernels;
  switch (isa) {
#if defined(VOICEMARK_HAVE_AVX2)
    case Isa::Avx2: return detail::kAvx2Kernels;
#endif
#if defined(VOICEMARK_HAVE_NEON)
    case Isa::Neon: return detail::kNeonKernels;
#endif
    default: break;
  }
  return detail::kScalarKernels;
}

namespace {

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("VOICEMARK_SIMD")) {
    const std::string want(forced);
    if (want == "avx2") return kernels_for(Isa::Avx2);
    if (want == "neon") return kernels_for(Isa::Neon);
    if (want == "scalar") return detail::kScalarKernels;
  }
  if (is_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  if (is_available(Isa::Neon)) return kernels_for(Isa::Neon);
  return detail::kScalarKernels;
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace voicemark::simd
