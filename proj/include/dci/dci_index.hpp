#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "dci/point.hpp"
#include "dci/simple_index.hpp"

namespace dci {

/// Number of simple indices per composite index (m) and of composite indices (L).
struct IndexParams {
    std::size_t m = 1;
    std::size_t L = 1;
};

/// L composite indices of m simple indices each, over one shared point store.
///
/// Directions are drawn from Rng(seed) as soon as the dimension is known:
/// composite-major (l = 0..L-1, then j = 0..m-1), d standard normals each,
/// normalized to unit length. They depend only on (seed, d, m, L).
///
/// Mutation (insert/erase) needs exclusive access; const member functions may
/// be called concurrently.
class DciIndex {
public:
    /// `dim == 0` defers direction sampling to the first insert.
    DciIndex(IndexParams params, std::uint64_t seed, std::size_t dim = 0);

    static DciIndex construct(std::span<const Point> points, IndexParams params, std::uint64_t seed);
    static DciIndex construct(const Dataset& points, IndexParams params, std::uint64_t seed);

    /// Throws std::invalid_argument on duplicate id, dimension mismatch or non-finite coordinates.
    void insert(PointId id, std::span<const double> coords);
    void insert(const Point& p) { insert(p.id, p.coords); }
    /// Throws std::out_of_range for an unknown id.
    void erase(PointId id);

    bool contains(PointId id) const { return slot_of_.contains(id); }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    const IndexParams& params() const noexcept { return params_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Coordinates of a stored point; throws std::out_of_range for an unknown id.
    std::span<const double> coords(PointId id) const;
    /// Stored ids in storage order (insertion order, perturbed by erase).
    std::span<const PointId> ids() const noexcept { return ids_; }
    Dataset to_dataset() const;

    const SimpleIndex& simple_index(std::size_t composite, std::size_t j) const {
        return simple_[composite * params_.m + j];
    }

    /// Binary snapshot: "DCI1", then d, n, m, L, seed as little-endian
    /// uint64, then n records of (id as uint64, d float64), all little-endian.
    /// Simple indices are rebuilt from the seed on load.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static DciIndex load(std::istream& in);
    static DciIndex load(const std::filesystem::path& path);

private:
    void init_directions();

    IndexParams params_;
    std::uint64_t seed_;
    std::size_t dim_;
    std::vector<SimpleIndex> simple_;
    std::vector<PointId> ids_;
    std::vector<double> coords_;
    std::unordered_map<PointId, std::size_t> slot_of_;
};

}  // namespace dci
