#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fhnet {

/// Pairwise (cascade) sum with a fixed split tree: the result depends only on
/// the values and their order, never on how the caller produced them.
double pairwise_sum(std::span<const double> values) noexcept;

/// Pool-adjacent-violators fit: the nondecreasing sequence closest to `values`
/// in least squares (equal weights).
std::vector<double> isotonic_nondecreasing(std::span<const double> values);

/// log(I0(x)) for x >= 0, accurate for arguments where I0 overflows.
double log_bessel_i0(double x) noexcept;

/// log(sum(exp(v))) without overflow.
double log_sum_exp(std::span<const double> values) noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Evenly spaced grid from `lo` to `hi` inclusive, values snapped to 1e-9 so
/// that e.g. 0.8 comes out as the literal 0.8.
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace fhnet
