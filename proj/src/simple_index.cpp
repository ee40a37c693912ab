#include "dci/simple_index.hpp"

#include <limits>

namespace dci {

SimpleIndex::SimpleIndex(std::vector<double> direction) : direction_(std::move(direction)) {}

double SimpleIndex::insert(PointId id, std::span<const double> coords) {
    const double key = project(coords);
    entries_.insert(KeyEntry{key, id});
    return key;
}

bool SimpleIndex::erase(PointId id, std::span<const double> coords) {
    return entries_.erase(KeyEntry{project(coords), id}) == 1;
}

NearestKeyCursor::NearestKeyCursor(const SimpleIndex& index, double q_key)
    : entries_(&index.entries()), q_key_(q_key) {
    up_ = entries_->lower_bound(KeyEntry{q_key, std::numeric_limits<PointId>::min()});
    run_begin_ = run_pos_ = run_end_ = up_;
    load_lower_run();
}

void NearestKeyCursor::load_lower_run() {
    if (run_begin_ == entries_->begin()) {
        run_pos_ = run_end_ = run_begin_;
        return;
    }
    run_end_ = run_begin_;
    auto it = std::prev(run_end_);
    const double key = it->key;
    while (it != entries_->begin() && std::prev(it)->key == key) --it;
    run_begin_ = run_pos_ = it;
}

std::optional<KeyEntry> NearestKeyCursor::next() {
    const bool has_lower = run_pos_ != run_end_;
    const bool has_upper = up_ != entries_->end();
    if (!has_lower && !has_upper) return std::nullopt;

    bool take_lower = has_lower;
    if (has_lower && has_upper) {
        take_lower = (q_key_ - run_pos_->key) <= (up_->key - q_key_);
    }
    if (take_lower) {
        KeyEntry e = *run_pos_;
        if (++run_pos_ == run_end_) load_lower_run();
        return e;
    }
    return *up_++;
}

}  // namespace dci
