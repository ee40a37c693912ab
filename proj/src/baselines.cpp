#include "dci/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dci/rng.hpp"

namespace dci {

std::vector<Neighbour> brute_force_knn(const Dataset& points, std::span<const double> q, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (k > points.size()) {
        throw std::invalid_argument("k = " + std::to_string(k) + " exceeds dataset size n = " +
                                    std::to_string(points.size()));
    }
    if (q.size() != points.dim()) throw std::invalid_argument("query dimension mismatch");

    std::vector<Neighbour> all(points.size());
    for (std::size_t r = 0; r < points.size(); ++r) {
        all[r] = Neighbour{points.id(r), distance(points.row(r), q)};
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    return all;
}

std::size_t LshIndex::KeyHash::operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (auto v : key) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
}

LshIndex::LshIndex(const Dataset& points, const LshParams& params, std::uint64_t seed)
    : params_(params), points_(points) {
    if (!(params_.bucket_width > 0.0)) throw std::invalid_argument("bucket width must be positive");
    if (params_.hashes_per_table == 0 || params_.tables == 0) {
        throw std::invalid_argument("H and T must be positive");
    }
    const std::size_t d = points_.dim();
    const std::size_t H = params_.hashes_per_table;
    Rng rng(seed);
    tables_.resize(params_.tables);
    for (std::size_t t = 0; t < tables_.size(); ++t) {
        Table& table = tables_[t];
        table.projections.resize(H * d);
        table.offsets.resize(H);
        for (std::size_t h = 0; h < H; ++h) {
            for (std::size_t i = 0; i < d; ++i) table.projections[h * d + i] = rng.normal();
            table.offsets[h] = rng.uniform(0.0, params_.bucket_width);
        }
        for (std::size_t r = 0; r < points_.size(); ++r) {
            table.buckets[bucket_key(t, points_.row(r))].push_back(r);
        }
    }
}

std::vector<std::int64_t> LshIndex::bucket_key(std::size_t table, std::span<const double> v) const {
    const Table& tb = tables_[table];
    const std::size_t d = points_.dim();
    std::vector<std::int64_t> key(params_.hashes_per_table);
    for (std::size_t h = 0; h < key.size(); ++h) {
        const std::span<const double> a(tb.projections.data() + h * d, d);
        key[h] = static_cast<std::int64_t>(std::floor((dot(a, v) + tb.offsets[h]) / params_.bucket_width));
    }
    return key;
}

LshResult LshIndex::query(std::span<const double> q, std::size_t k) const {
    if (q.size() != points_.dim()) throw std::invalid_argument("query dimension mismatch");
    if (k == 0) throw std::invalid_argument("k must be positive");

    std::vector<char> seen(points_.size(), 0);
    std::vector<Neighbour> cands;
    for (std::size_t t = 0; t < tables_.size(); ++t) {
        auto it = tables_[t].buckets.find(bucket_key(t, q));
        if (it == tables_[t].buckets.end()) continue;
        for (std::size_t r : it->second) {
            if (seen[r]) continue;
            seen[r] = 1;
            cands.push_back(Neighbour{points_.id(r), distance(points_.row(r), q)});
        }
    }
    LshResult out;
    out.unique_candidates = cands.size();
    const std::size_t keep = std::min(k, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), closer);
    cands.resize(keep);
    out.neighbours = std::move(cands);
    return out;
}

}  // namespace dci
