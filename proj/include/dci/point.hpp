#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dci {

using PointId = std::uint64_t;

struct Point {
    PointId id = 0;
    std::vector<double> coords;
};

/// An (id, distance) pair as returned by every k-NN routine in the library.
struct Neighbour {
    PointId id = 0;
    double dist = 0.0;

    friend bool operator==(const Neighbour&, const Neighbour&) = default;
};

/// Orders by distance, then id.
constexpr bool closer(const Neighbour& a, const Neighbour& b) noexcept {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

/// Dense row-major point collection with a fixed dimension.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }

    PointId id(std::size_t row) const { return ids_[row]; }
    std::span<const double> row(std::size_t row) const {
        return {coords_.data() + row * dim_, dim_};
    }
    std::span<const PointId> ids() const noexcept { return ids_; }
    std::span<const double> coords() const noexcept { return coords_; }

    /// Appends a point. The first push fixes the dimension of a
    /// default-constructed dataset. Throws std::invalid_argument on mismatch
    /// or non-finite coordinates.
    void push_back(PointId id, std::span<const double> coords);
    void push_back(const Point& p) { push_back(p.id, p.coords); }

    Point point(std::size_t row) const;

    /// Rows selected by position, in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;

    void reserve(std::size_t n) {
        ids_.reserve(n);
        coords_.reserve(n * dim_);
    }

private:
    std::size_t dim_ = 0;
    std::vector<PointId> ids_;
    std::vector<double> coords_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double distance(std::span<const double> a, std::span<const double> b) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Throws std::invalid_argument naming `what` if any coordinate is NaN or infinite.
void require_finite(std::span<const double> coords, const std::string& what);

}  // namespace dci
