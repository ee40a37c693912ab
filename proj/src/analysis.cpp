#include "dci/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dci/rng.hpp"

namespace dci {

double inversion_bound(double short_len, double long_len) {
    if (!(short_len > 0.0) || !(short_len <= long_len)) {
        throw std::invalid_argument("inversion_bound requires 0 < short_len <= long_len");
    }
    const double ratio = std::clamp(short_len / long_len, 0.0, 1.0);
    return 1.0 - (2.0 / std::numbers::pi) * std::acos(ratio);
}

double monte_carlo_inversion_rate(std::span<const double> v_short, std::span<const double> v_long,
                                  std::size_t trials, std::uint64_t seed) {
    if (v_short.size() != v_long.size() || v_short.empty()) {
        throw std::invalid_argument("vectors must share a positive dimension");
    }
    const double s2 = dot(v_short, v_short);
    const double l2 = dot(v_long, v_long);
    if (s2 == 0.0 || l2 == 0.0) throw std::invalid_argument("zero vector");
    if (!(s2 < l2)) throw std::invalid_argument("v_short must be strictly shorter than v_long");
    if (trials == 0) throw std::invalid_argument("trials must be positive");

    // Scaling u does not change the comparison, so the normal draw need not
    // be normalized.
    Rng rng(seed);
    std::vector<double> u(v_short.size());
    std::size_t inverted = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& x : u) x = rng.normal();
        if (std::abs(dot(v_long, u)) <= std::abs(dot(v_short, u))) ++inverted;
    }
    return static_cast<double>(inverted) / static_cast<double>(trials);
}

SparsityProfile estimate_global_sparsity(const Dataset& points, std::size_t tau) {
    const std::size_t n = points.size();
    if (tau == 0) throw std::invalid_argument("tau must be positive");
    if (n < 2 * tau) throw std::invalid_argument("need n >= 2 tau points");

    double gamma = std::numeric_limits<double>::infinity();
    std::vector<double> dists(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t o = 0; o < n; ++o) dists[o] = distance(points.row(p), points.row(o));
        dists[p] = 0.0;
        std::sort(dists.begin(), dists.end());
        // dists[r - 1] is the distance at 1-based rank r.
        for (std::size_t r = tau; 2 * r <= n; ++r) {
            const double inner = dists[r - 1];
            if (inner == 0.0) continue;
            gamma = std::min(gamma, dists[2 * r - 1] / inner);
        }
    }
    SparsityProfile out;
    out.tau = tau;
    out.gamma = std::isfinite(gamma) ? std::max(gamma, 1.0) : 1.0;
    out.intrinsic_dim = out.gamma > 1.0 ? 1.0 / std::log2(out.gamma) : kUnboundedIntrinsicDim;
    return out;
}

}  // namespace dci
