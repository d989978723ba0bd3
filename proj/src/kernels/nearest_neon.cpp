#include "microsim/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace microsim::kernels {

std::size_t nearest_neon(double east, double north, std::span<const double> xs,
                         std::span<const double> ys) noexcept {
  const std::size_t n = xs.size();
  if (n < 4) return nearest_scalar(east, north, xs, ys);

  const float64x2_t qe = vdupq_n_f64(east);
  const float64x2_t qn = vdupq_n_f64(north);
  float64x2_t best_d2 = vdupq_n_f64(__builtin_inf());
  float64x2_t best_idx = vdupq_n_f64(0.0);
  float64x2_t idx = {0.0, 1.0};
  const float64x2_t step = vdupq_n_f64(2.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t de = vsubq_f64(vld1q_f64(xs.data() + i), qe);
    const float64x2_t dn = vsubq_f64(vld1q_f64(ys.data() + i), qn);
    const float64x2_t d2 = vaddq_f64(vmulq_f64(de, de), vmulq_f64(dn, dn));
    const uint64x2_t lt = vcltq_f64(d2, best_d2);
    best_d2 = vbslq_f64(lt, d2, best_d2);
    best_idx = vbslq_f64(lt, idx, best_idx);
    idx = vaddq_f64(idx, step);
  }

  double bd = vgetq_lane_f64(best_d2, 0);
  auto bi = static_cast<std::size_t>(vgetq_lane_f64(best_idx, 0));
  const double d1 = vgetq_lane_f64(best_d2, 1);
  const auto i1 = static_cast<std::size_t>(vgetq_lane_f64(best_idx, 1));
  if (d1 < bd || (d1 == bd && i1 < bi)) {
    bd = d1;
    bi = i1;
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
