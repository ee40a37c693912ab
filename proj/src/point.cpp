#include "dci/point.hpp"

#include <cmath>

namespace dci {

void Dataset::push_back(PointId id, std::span<const double> coords) {
    if (coords.empty()) {
        throw std::invalid_argument("point " + std::to_string(id) + " has dimension 0");
    }
    if (dim_ == 0 && ids_.empty()) {
        dim_ = coords.size();
    } else if (coords.size() != dim_) {
        throw std::invalid_argument("point " + std::to_string(id) + " has dimension " +
                                    std::to_string(coords.size()) + ", expected " +
                                    std::to_string(dim_));
    }
    require_finite(coords, "point " + std::to_string(id));
    ids_.push_back(id);
    coords_.insert(coords_.end(), coords.begin(), coords.end());
}

Point Dataset::point(std::size_t r) const {
    auto c = row(r);
    return Point{ids_[r], std::vector<double>(c.begin(), c.end())};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out(dim_);
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        out.ids_.push_back(ids_[r]);
        auto c = row(r);
        out.coords_.insert(out.coords_.end(), c.begin(), c.end());
    }
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void require_finite(std::span<const double> coords, const std::string& what) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!std::isfinite(coords[i])) {
            throw std::invalid_argument(what + ": non-finite coordinate at position " +
                                        std::to_string(i));
        }
    }
}

}  // namespace dci
