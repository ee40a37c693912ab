#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dci/dci_index.hpp"
#include "dci/point.hpp"

namespace dci {

/// Stop after a preset number of outer iterations.
struct FixedIterations {
    std::size_t k_tilde = 0;
};

/// Stop once the bound on the probability of having missed a true
/// neighbour drops to epsilon or below.
struct Adaptive {
    double epsilon = 0.1;
};

struct QueryParams {
    std::size_t k = 1;
    std::variant<FixedIterations, Adaptive> mode = Adaptive{};
};

enum class Termination { BudgetExhausted, TestPassed, DatasetExhausted };

std::string_view to_string(Termination t) noexcept;

struct QueryReport {
    /// k nearest candidates by true distance, ascending, ties by id.
    std::vector<Neighbour> neighbours;
    /// Points promoted to a candidate by at least one composite index.
    std::size_t unique_candidates = 0;
    std::size_t outer_iterations = 0;
    Termination termination = Termination::DatasetExhausted;
};

/// k-NN retrieval over all composite indices.
///
/// Each outer iteration advances every simple index's cursor by one entry
/// and adds a vote for the yielded point in its composite index; a point
/// becomes a candidate of composite index l when all m of its simple
/// indices have yielded it. Candidate distances are computed once, on first
/// promotion. The loop ends on the mode's condition, or when every point is
/// a candidate.
///
/// Throws std::invalid_argument on an empty index, dimension mismatch,
/// k > n, or invalid mode parameters (k_tilde outside [k, n], epsilon
/// outside (0, 1)).
QueryReport query(const DciIndex& index, std::span<const double> q, const QueryParams& params);

/// Equivalent to calling query() with FixedIterations(b) for every b in
/// `budgets`, but runs the retrieval once. `budgets` must be nondecreasing.
std::vector<QueryReport> query_budget_sweep(const DciIndex& index, std::span<const double> q,
                                            std::size_t k, std::span<const std::size_t> budgets);

/// Upper bound on the probability that some true k-nearest neighbour has
/// not been retrieved:
///   prod_l (1 - ((2/pi) * acos(kth_dist / max_dists[l]))^m)
/// The ratio is clamped to [0, 1]; kth_dist == 0 gives 0.
double stopping_statistic(double kth_dist, std::span<const double> max_dists, std::size_t m);

/// True iff stopping_statistic(...) <= epsilon.
bool stopping_test(double kth_dist, std::span<const double> max_dists, std::size_t m, double epsilon);

/// Outer-iteration budget for the fixed-iteration mode on data with global
/// relative sparsity (k, gamma):
///   clamp(ceil(c * max(k log2(n/k), k (n/k)^(1 - log2 gamma))), k, n)
/// Throws std::invalid_argument if gamma < 1, c <= 0 or not n >= k >= 1.
std::size_t suggest_k_tilde(std::size_t n, std::size_t k, double gamma, double c = 1.0);

}  // namespace dci
