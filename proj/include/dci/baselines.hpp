#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dci/point.hpp"

namespace dci {

/// Exact k nearest neighbours by linear scan, ascending by (distance, id).
/// Throws std::invalid_argument if k == 0, k > n or on dimension mismatch.
std::vector<Neighbour> brute_force_knn(const Dataset& points, std::span<const double> q, std::size_t k);

struct LshParams {
    std::size_t hashes_per_table = 24;  // H
    std::size_t tables = 100;           // T
    double bucket_width = 1.0;          // w
};

struct LshResult {
    /// Up to k candidates, ascending by (distance, id). Empty when the query
    /// shares no bucket with any point.
    std::vector<Neighbour> neighbours;
    std::size_t unique_candidates = 0;
};

/// Euclidean LSH with T tables of H concatenated hashes
/// h(p) = floor((<a, p> + b) / w), a ~ N(0, I), b ~ U[0, w).
class LshIndex {
public:
    /// Throws std::invalid_argument if w <= 0, H == 0 or T == 0.
    LshIndex(const Dataset& points, const LshParams& params, std::uint64_t seed);

    LshResult query(std::span<const double> q, std::size_t k) const;

    const LshParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::size_t bucket_count(std::size_t table) const { return tables_[table].buckets.size(); }
    /// The bucket key of a vector in one table.
    std::vector<std::int64_t> bucket_key(std::size_t table, std::span<const double> v) const;

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
    };
    struct Table {
        std::vector<double> projections;  // H rows of d
        std::vector<double> offsets;      // H
        std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, KeyHash> buckets;
    };

    LshParams params_;
    Dataset points_;
    std::vector<Table> tables_;
};

}  // namespace dci
