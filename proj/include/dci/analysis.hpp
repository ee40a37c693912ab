#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include "dci/point.hpp"

namespace dci {

/// Probability bound that a random unit projection makes a vector of length
/// `short_len` at least as long as one of length `long_len`:
///   1 - (2/pi) * acos(short_len / long_len)
/// Throws std::invalid_argument unless 0 < short_len <= long_len.
double inversion_bound(double short_len, double long_len);

/// Fraction of `trials` uniformly random unit directions u for which
/// |<v_long, u>| <= |<v_short, u>|. Test oracle for inversion_bound.
/// Throws std::invalid_argument for zero vectors, mismatched dimensions,
/// ||v_short|| >= ||v_long|| or trials == 0.
double monte_carlo_inversion_rate(std::span<const double> v_short, std::span<const double> v_long,
                                  std::size_t trials, std::uint64_t seed);

/// Sentinel intrinsic dimension for gamma == 1.
inline constexpr double kUnboundedIntrinsicDim = std::numeric_limits<double>::infinity();

struct SparsityProfile {
    std::size_t tau = 1;
    double gamma = 1.0;
    /// 1 / log2(gamma), or kUnboundedIntrinsicDim when gamma == 1.
    double intrinsic_dim = kUnboundedIntrinsicDim;
};

/// Empirical global relative sparsity.
///
/// For every point p, the other points are ranked by distance with p itself
/// at rank 1. For each rank r >= tau with 2r <= n the doubling ratio
/// dist(rank 2r) / dist(rank r) is taken; gamma is the smallest such ratio
/// over all p and r, floored at 1. Ratios with a zero denominator are
/// skipped; if all are skipped gamma is 1.
///
/// This is a sample surrogate of a condition stated over all radii, and it
/// costs O(n^2 log n). Use it on small datasets or samples.
/// Throws std::invalid_argument if tau == 0 or n < 2 tau.
SparsityProfile estimate_global_sparsity(const Dataset& points, std::size_t tau);

}  // namespace dci
