#include "dci/query.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace dci {

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::BudgetExhausted: return "BudgetExhausted";
        case Termination::TestPassed: return "TestPassed";
        case Termination::DatasetExhausted: return "DatasetExhausted";
    }
    return "Unknown";
}

namespace {

// Query-local retrieval state: one cursor per simple index, vote counters
// per composite index, and the running k closest candidates.
class Retrieval {
public:
    Retrieval(const DciIndex& index, std::span<const double> q, std::size_t k)
        : index_(index), q_(q), k_(k), m_(index.params().m), L_(index.params().L),
          votes_(L_), max_dist_(L_, 0.0), has_candidate_(L_, false) {
        cursors_.reserve(m_ * L_);
        for (std::size_t l = 0; l < L_; ++l) {
            for (std::size_t j = 0; j < m_; ++j) {
                const SimpleIndex& si = index.simple_index(l, j);
                cursors_.emplace_back(si, si.project(q));
            }
        }
        top_.reserve(k_ + 1);
    }

    void step() {
        ++iterations_;
        for (std::size_t l = 0; l < L_; ++l) {
            auto& votes = votes_[l];
            for (std::size_t j = 0; j < m_; ++j) {
                auto entry = cursors_[l * m_ + j].next();
                if (!entry) continue;
                if (++votes[entry->id] == m_) promote(l, entry->id);
            }
        }
    }

    bool exhausted() const noexcept {
        return iterations_ >= index_.size() || seen_.size() == index_.size();
    }

    /// Only meaningful once at least k candidates exist.
    bool test_passes(double epsilon) const {
        const double kth = top_.back().dist;
        // A composite index with no candidate, or whose farthest candidate is
        // nearer than the k-th, contributes a factor of 1 through the clamp.
        std::vector<double> maxes(L_);
        for (std::size_t l = 0; l < L_; ++l) maxes[l] = has_candidate_[l] ? max_dist_[l] : kth;
        return stopping_test(kth, maxes, m_, epsilon);
    }

    std::size_t candidates() const noexcept { return seen_.size(); }
    std::size_t iterations() const noexcept { return iterations_; }

    QueryReport report(Termination t) const {
        return QueryReport{top_, seen_.size(), iterations_, t};
    }

private:
    void promote(std::size_t l, PointId id) {
        auto [it, fresh] = seen_.try_emplace(id, 0.0);
        if (fresh) {
            it->second = distance(index_.coords(id), q_);
            offer(Neighbour{id, it->second});
        }
        if (!has_candidate_[l] || it->second > max_dist_[l]) max_dist_[l] = it->second;
        has_candidate_[l] = true;
    }

    void offer(const Neighbour& nb) {
        if (top_.size() == k_ && !closer(nb, top_.back())) return;
        top_.insert(std::upper_bound(top_.begin(), top_.end(), nb, closer), nb);
        if (top_.size() > k_) top_.pop_back();
    }

    const DciIndex& index_;
    std::span<const double> q_;
    std::size_t k_;
    std::size_t m_;
    std::size_t L_;
    std::vector<NearestKeyCursor> cursors_;
    std::vector<std::unordered_map<PointId, std::size_t>> votes_;
    std::unordered_map<PointId, double> seen_;
    std::vector<double> max_dist_;
    std::vector<bool> has_candidate_;
    std::vector<Neighbour> top_;
    std::size_t iterations_ = 0;
};

void check_query(const DciIndex& index, std::span<const double> q, std::size_t k) {
    if (index.empty()) throw std::invalid_argument("query on an empty index");
    if (q.size() != index.dim()) {
        throw std::invalid_argument("query has dimension " + std::to_string(q.size()) +
                                    ", index dimension is " + std::to_string(index.dim()));
    }
    require_finite(q, "query");
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (k > index.size()) {
        throw std::invalid_argument("k = " + std::to_string(k) + " exceeds dataset size n = " +
                                    std::to_string(index.size()));
    }
}

}  // namespace

QueryReport query(const DciIndex& index, std::span<const double> q, const QueryParams& params) {
    check_query(index, q, params.k);
    const std::size_t n = index.size();

    if (const auto* fixed = std::get_if<FixedIterations>(&params.mode)) {
        if (fixed->k_tilde < params.k || fixed->k_tilde > n) {
            throw std::invalid_argument("k_tilde = " + std::to_string(fixed->k_tilde) +
                                        " must lie in [k, n] = [" + std::to_string(params.k) +
                                        ", " + std::to_string(n) + "]");
        }
        Retrieval r(index, q, params.k);
        while (true) {
            r.step();
            if (r.exhausted()) return r.report(Termination::DatasetExhausted);
            if (r.iterations() >= fixed->k_tilde) return r.report(Termination::BudgetExhausted);
        }
    }

    const double epsilon = std::get<Adaptive>(params.mode).epsilon;
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
    }
    Retrieval r(index, q, params.k);
    while (true) {
        r.step();
        if (r.candidates() >= params.k && r.test_passes(epsilon)) {
            return r.report(Termination::TestPassed);
        }
        if (r.exhausted()) return r.report(Termination::DatasetExhausted);
    }
}

std::vector<QueryReport> query_budget_sweep(const DciIndex& index, std::span<const double> q,
                                            std::size_t k, std::span<const std::size_t> budgets) {
    check_query(index, q, k);
    if (!std::is_sorted(budgets.begin(), budgets.end())) {
        throw std::invalid_argument("budgets must be nondecreasing");
    }
    for (std::size_t b : budgets) {
        if (b < k || b > index.size()) {
            throw std::invalid_argument("budget " + std::to_string(b) + " outside [k, n]");
        }
    }

    std::vector<QueryReport> out;
    out.reserve(budgets.size());
    Retrieval r(index, q, k);
    for (std::size_t b : budgets) {
        while (r.iterations() < b && !r.exhausted()) r.step();
        out.push_back(r.report(r.exhausted() ? Termination::DatasetExhausted
                                             : Termination::BudgetExhausted));
    }
    return out;
}

double stopping_statistic(double kth_dist, std::span<const double> max_dists, std::size_t m) {
    if (kth_dist <= 0.0) return 0.0;
    double stat = 1.0;
    for (double max_dist : max_dists) {
        const double ratio = max_dist > 0.0 ? std::clamp(kth_dist / max_dist, 0.0, 1.0) : 1.0;
        const double keep = (2.0 / std::numbers::pi) * std::acos(ratio);
        stat *= 1.0 - std::pow(keep, static_cast<double>(m));
    }
    return stat;
}

bool stopping_test(double kth_dist, std::span<const double> max_dists, std::size_t m, double epsilon) {
    return stopping_statistic(kth_dist, max_dists, m) <= epsilon;
}

std::size_t suggest_k_tilde(std::size_t n, std::size_t k, double gamma, double c) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
    if (!(c > 0.0)) throw std::invalid_argument("multiplier c must be positive");
    if (k == 0 || n < k) throw std::invalid_argument("require n >= k >= 1");

    const double ratio = static_cast<double>(n) / static_cast<double>(k);
    const double kd = static_cast<double>(k);
    const double log_term = kd * std::log2(ratio);
    const double density_term = kd * std::pow(ratio, 1.0 - std::log2(gamma));
    const double raw = std::ceil(c * std::max(log_term, density_term));
    if (!(raw < static_cast<double>(n))) return n;
    return std::max(k, static_cast<std::size_t>(std::max(raw, 0.0)));
}

}  // namespace dci
