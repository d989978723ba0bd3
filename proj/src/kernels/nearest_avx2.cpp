#include "microsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace microsim::kernels {

// Four lanes each track their own first minimum; the horizontal reduction
// then takes the smallest distance and, among equals, the smallest index.
__attribute__((target("avx2"))) std::size_t nearest_avx2(double east, double north,
                                                         std::span<const double> xs,
                                                         std::span<const double> ys) noexcept {
  const std::size_t n = xs.size();
  if (n < 8) return nearest_scalar(east, north, xs, ys);

  const __m256d qe = _mm256_set1_pd(east);
  const __m256d qn = _mm256_set1_pd(north);
  __m256d best_d2 = _mm256_set1_pd(__builtin_inf());
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(4.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d de = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), qe);
    const __m256d dn = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), qn);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(de, de), _mm256_mul_pd(dn, dn));
    const __m256d lt = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
    idx = _mm256_add_pd(idx, step);
  }

  alignas(32) double lane_d2[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_pd(lane_idx, best_idx);
  double bd = lane_d2[0];
  std::size_t bi = static_cast<std::size_t>(lane_idx[0]);
  for (int l = 1; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(lane_idx[l]);
    if (lane_d2[l] < bd || (lane_d2[l] == bd && li < bi)) {
      bd = lane_d2[l];
      bi = li;
    }
  }
  for (; i < n; ++i) {
    const double de = xs[i] - east;
    const double dn = ys[i] - north;
    const double d2 = de * de + dn * dn;
    if (d2 < bd) {
      bd = d2;
      bi = i;
    }
  }
  return bi;
}

}  // namespace microsim::kernels

#endif
