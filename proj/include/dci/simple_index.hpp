#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "dci/point.hpp"

namespace dci {

/// One entry of a simple index: a projection value and the point it belongs to.
struct KeyEntry {
    double key = 0.0;
    PointId id = 0;

    friend auto operator<=>(const KeyEntry&, const KeyEntry&) = default;
};

/// Points ordered by their projection onto a single unit direction.
///
/// Entries are kept in a balanced tree ordered by (key, id), so equal
/// projections still have distinct positions. Insert, erase and seek are
/// logarithmic; traversal from any position steps in both directions.
class SimpleIndex {
public:
    using Container = std::set<KeyEntry>;
    using const_iterator = Container::const_iterator;

    explicit SimpleIndex(std::vector<double> direction);

    std::span<const double> direction() const noexcept { return direction_; }
    double project(std::span<const double> coords) const noexcept { return dot(coords, direction_); }

    /// Returns the stored key.
    double insert(PointId id, std::span<const double> coords);
    /// `coords` must be the coordinates the point was inserted with.
    bool erase(PointId id, std::span<const double> coords);

    std::size_t size() const noexcept { return entries_.size(); }
    const_iterator begin() const noexcept { return entries_.begin(); }
    const_iterator end() const noexcept { return entries_.end(); }
    const Container& entries() const noexcept { return entries_; }

private:
    std::vector<double> direction_;
    Container entries_;
};

/// Walks a simple index outward from a query key.
///
/// The i-th call to next() returns the entry with the i-th smallest
/// |key - q_key|. Equal gaps resolve toward the smaller key, then the smaller
/// id. One iterator walks down from just below q_key and one walks up from
/// the first key >= q_key; each step takes whichever side is closer.
class NearestKeyCursor {
public:
    NearestKeyCursor(const SimpleIndex& index, double q_key);

    /// std::nullopt once every entry has been yielded.
    std::optional<KeyEntry> next();

    double query_key() const noexcept { return q_key_; }

private:
    void load_lower_run();

    const SimpleIndex::Container* entries_;
    double q_key_;
    SimpleIndex::const_iterator up_;
    // Entries strictly below q_key are consumed one equal-key run at a time,
    // ascending by id inside each run: [run_begin_, run_pos_) done,
    // [run_pos_, run_end_) pending.
    SimpleIndex::const_iterator run_begin_;
    SimpleIndex::const_iterator run_pos_;
    SimpleIndex::const_iterator run_end_;
};

}  // namespace dci
