#include "dci/dci_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dci/detail/binary_io.hpp"
#include "dci/rng.hpp"

namespace dci {

namespace {

constexpr char kSnapshotMagic[4] = {'D', 'C', 'I', '1'};

std::vector<double> random_unit_vector(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        for (auto& x : v) x = rng.normal();
        norm2 = dot(v, v);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

}  // namespace

DciIndex::DciIndex(IndexParams params, std::uint64_t seed, std::size_t dim)
    : params_(params), seed_(seed), dim_(dim) {
    if (params_.m == 0 || params_.L == 0) {
        throw std::invalid_argument("m and L must be positive");
    }
    if (dim_ > 0) init_directions();
}

void DciIndex::init_directions() {
    Rng rng(seed_);
    simple_.clear();
    simple_.reserve(params_.m * params_.L);
    for (std::size_t t = 0; t < params_.m * params_.L; ++t) {
        simple_.emplace_back(random_unit_vector(rng, dim_));
    }
}

DciIndex DciIndex::construct(std::span<const Point> points, IndexParams params, std::uint64_t seed) {
    std::size_t dim = 0;
    if (!points.empty()) {
        dim = points.front().coords.size();
        if (dim == 0) {
            throw std::invalid_argument("point " + std::to_string(points.front().id) + " has dimension 0");
        }
    }
    DciIndex index(params, seed, dim);
    index.ids_.reserve(points.size());
    index.coords_.reserve(points.size() * dim);
    for (const auto& p : points) index.insert(p);
    return index;
}

DciIndex DciIndex::construct(const Dataset& points, IndexParams params, std::uint64_t seed) {
    DciIndex index(params, seed, points.dim());
    index.ids_.reserve(points.size());
    index.coords_.reserve(points.size() * points.dim());
    for (std::size_t r = 0; r < points.size(); ++r) index.insert(points.id(r), points.row(r));
    return index;
}

void DciIndex::insert(PointId id, std::span<const double> coords) {
    if (coords.empty()) {
        throw std::invalid_argument("point " + std::to_string(id) + " has dimension 0");
    }
    if (dim_ == 0) {
        dim_ = coords.size();
        init_directions();
    }
    if (coords.size() != dim_) {
        throw std::invalid_argument("point " + std::to_string(id) + " has dimension " +
                                    std::to_string(coords.size()) + ", index dimension is " +
                                    std::to_string(dim_));
    }
    if (slot_of_.contains(id)) {
        throw std::invalid_argument("duplicate point id " + std::to_string(id));
    }
    require_finite(coords, "point " + std::to_string(id));

    slot_of_.emplace(id, ids_.size());
    ids_.push_back(id);
    coords_.insert(coords_.end(), coords.begin(), coords.end());
    for (auto& si : simple_) si.insert(id, coords);
}

void DciIndex::erase(PointId id) {
    auto it = slot_of_.find(id);
    if (it == slot_of_.end()) {
        throw std::out_of_range("unknown point id " + std::to_string(id));
    }
    const std::size_t slot = it->second;
    const std::span<const double> c(coords_.data() + slot * dim_, dim_);
    for (auto& si : simple_) si.erase(id, c);

    const std::size_t last = ids_.size() - 1;
    if (slot != last) {
        std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(last * dim_), dim_,
                    coords_.begin() + static_cast<std::ptrdiff_t>(slot * dim_));
        ids_[slot] = ids_[last];
        slot_of_[ids_[slot]] = slot;
    }
    ids_.pop_back();
    coords_.resize(ids_.size() * dim_);
    slot_of_.erase(id);
}

std::span<const double> DciIndex::coords(PointId id) const {
    auto it = slot_of_.find(id);
    if (it == slot_of_.end()) {
        throw std::out_of_range("unknown point id " + std::to_string(id));
    }
    return {coords_.data() + it->second * dim_, dim_};
}

Dataset DciIndex::to_dataset() const {
    Dataset out(dim_);
    out.reserve(ids_.size());
    for (std::size_t s = 0; s < ids_.size(); ++s) {
        out.push_back(ids_[s], std::span<const double>(coords_.data() + s * dim_, dim_));
    }
    return out;
}

void DciIndex::save(std::ostream& out) const {
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    detail::write_le<std::uint64_t>(out, dim_);
    detail::write_le<std::uint64_t>(out, ids_.size());
    detail::write_le<std::uint64_t>(out, params_.m);
    detail::write_le<std::uint64_t>(out, params_.L);
    detail::write_le<std::uint64_t>(out, seed_);
    for (std::size_t s = 0; s < ids_.size(); ++s) {
        detail::write_le<std::uint64_t>(out, ids_[s]);
        for (std::size_t i = 0; i < dim_; ++i) detail::write_f64(out, coords_[s * dim_ + i]);
    }
    if (!out) throw std::runtime_error("failed writing index snapshot");
}

void DciIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    save(out);
}

DciIndex DciIndex::load(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || !std::equal(magic, magic + 4, kSnapshotMagic)) {
        throw std::runtime_error("not an index snapshot (bad magic)");
    }
    const auto dim = detail::read_le<std::uint64_t>(in, "snapshot header");
    const auto n = detail::read_le<std::uint64_t>(in, "snapshot header");
    const auto m = detail::read_le<std::uint64_t>(in, "snapshot header");
    const auto L = detail::read_le<std::uint64_t>(in, "snapshot header");
    const auto seed = detail::read_le<std::uint64_t>(in, "snapshot header");
    if (n > 0 && dim == 0) throw std::runtime_error("snapshot has points but dimension 0");

    DciIndex index(IndexParams{m, L}, seed, dim);
    std::vector<double> c(dim);
    for (std::uint64_t r = 0; r < n; ++r) {
        const auto id = detail::read_le<std::uint64_t>(in, "snapshot point record");
        for (auto& x : c) x = detail::read_f64(in, "snapshot point record");
        index.insert(id, c);
    }
    return index;
}

DciIndex DciIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load(in);
}

}  // namespace dci
