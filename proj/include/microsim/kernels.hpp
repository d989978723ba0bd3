#pragma once

// Nearest-point argmin kernels. Coordinates are whole meters held in doubles;
// squared distances below 2^53 are exact, so every variant returns the same
// index as the scalar reference (first index among equal minima).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace microsim::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();
/// The variant selected by dispatch: the best available one unless the
/// MICROSIM_KERNEL environment variable or force_isa() overrides it.
Isa active_isa();
/// Throws Error if `isa` is not available.
void force_isa(Isa isa);

std::size_t nearest_scalar(double east, double north, std::span<const double> xs,
                           std::span<const double> ys) noexcept;
#if defined(__x86_64__) || defined(_M_X64)
std::size_t nearest_avx2(double east, double north, std::span<const double> xs,
                         std::span<const double> ys) noexcept;
#endif
#if defined(__aarch64__)
std::size_t nearest_neon(double east, double north, std::span<const double> xs,
                         std::span<const double> ys) noexcept;
#endif

/// Index of the point nearest to (east, north); `xs` must be non-empty and
/// the same length as `ys`.
std::size_t nearest(double east, double north, std::span<const double> xs,
                    std::span<const double> ys) noexcept;

/// Runs a specific variant; `isa` must be available.
std::size_t nearest_with(Isa isa, double east, double north, std::span<const double> xs,
                         std::span<const double> ys) noexcept;

}  // namespace microsim::kernels
