#include "microsim/kernels.hpp"

namespace microsim::kernels {

std::size_t nearest_scalar(double east, double north, std::span<const double> xs,
                           std::span<const double> ys) noexcept {
  std::size_t best = 0;
  double best_d2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double de = xs[i] - east;
    const double dn = ys[i] - north;
    const double d2 = de * de + dn * dn;
    if (i == 0 || d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

}  // namespace microsim::kernels
