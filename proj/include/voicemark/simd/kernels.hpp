#pragma once

// Data-parallel inner loops shared by the DSP and statistics code.
//
// Every kernel has a scalar reference implementation plus optional AVX2 and
// NEON variants. The variant is picked once at first use from the running
// CPU; VOICEMARK_SIMD=scalar|avx2|neon forces a choice (unavailable choices
// fall back to scalar).

#include <cstddef>
#include <span>
#include <string_view>

namespace voicemark::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  // out[i] = a[i] * scale
  void (*scale)(const double* a, double scale, double* out, std::size_t n);
};

/// True when `isa` is compiled in and supported by this CPU.
bool is_available(Isa isa) noexcept;

/// Kernels for a specific ISA; falls back to scalar when unavailable.
const KernelTable& kernels_for(Isa isa) noexcept;

/// Kernels selected for this process.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}
inline double sum_squares(std::span<const double> a) noexcept {
  return active().sum_squares(a.data(), a.size());
}
inline double sum(std::span<const double> a) noexcept { return active().sum(a.data(), a.size()); }
inline double max_abs(std::span<const double> a) noexcept {
  return active().max_abs(a.data(), a.size());
}
inline void scale(std::span<const double> a, double factor, std::span<double> out) noexcept {
  active().scale(a.data(), factor, out.data(), a.size() < out.size() ? a.size() : out.size());
}

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(VOICEMARK_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(VOICEMARK_HAVE_NEON)
extern const KernelTable kNeonKernels;
#endif
}  // namespace detail

}  // namespace voicemark::simd
