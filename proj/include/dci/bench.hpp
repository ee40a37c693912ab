#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dci/dataset_io.hpp"
#include "dci/dci_index.hpp"
#include "dci/point.hpp"

namespace dci {

/// Returned when the exact k-th distance is 0 but the approximate one is not.
inline constexpr double kInfiniteRatio = std::numeric_limits<double>::infinity();

/// Radius of the approximate k-NN ball over the radius of the exact one
/// (k-th distance over k-th distance). 1 when both are 0.
/// Throws std::invalid_argument if the lists differ in length or are empty.
double approximation_ratio(std::span<const Neighbour> approx, std::span<const Neighbour> exact);

struct DciBenchConfig {
    IndexParams params{15, 3};
    bool fixed = true;
    /// Outer-iteration budgets; empty means k, 2k, 4k, ... capped at and including n.
    std::vector<std::size_t> k_tilde;
    bool adaptive = true;
    std::vector<double> epsilons{0.5, 0.2, 0.1, 0.05, 0.01};
};

struct LshBenchConfig {
    std::size_t hashes_per_table = 24;
    std::size_t tables = 100;
    /// Explicit bucket widths; when empty, widths are the multipliers times
    /// (median pairwise distance / sqrt(H)) on each fold's data.
    std::vector<double> widths;
    std::vector<double> width_multipliers{0.5, 1.0, 2.0, 4.0};
};

struct BenchConfig {
    std::filesystem::path data;
    DatasetFormat format = DatasetFormat::Csv;
    bool id_column = false;
    std::size_t k = 25;
    std::size_t folds = 10;
    std::size_t queries_per_fold = 100;
    std::uint64_t seed = 0;
    bool exact = true;
    std::optional<DciBenchConfig> dci = DciBenchConfig{};
    std::optional<LshBenchConfig> lsh = LshBenchConfig{};
    std::filesystem::path output;     // CSV of curve points; empty: not written
    std::filesystem::path query_log;  // JSON lines; empty: not written
};

/// Flat key=value file, '#' starts a comment. Keys:
///   data format id_column k folds queries_per_fold seed output log
///   methods            comma list of exact, dci-fixed, dci-adaptive, lsh
///   dci_m dci_L
///   dci_k_tilde        comma list or "auto"
///   dci_epsilon        comma list
///   lsh_H lsh_T
///   lsh_w              comma list or "auto"
///   lsh_w_multipliers  comma list
/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
BenchConfig parse_bench_config(std::istream& in, const std::filesystem::path& base_dir = {});
BenchConfig load_bench_config(const std::filesystem::path& path);

/// One row of the curve CSV. `fold` is the fold number, or "all" for the
/// aggregate across folds, whose std columns are the spread of fold means.
struct CurvePoint {
    std::string method;
    std::string param_label;
    std::string fold;
    double mean_candidates = 0.0;
    double std_candidates = 0.0;
    /// Over queries that returned k points and a finite ratio.
    double mean_ratio = 0.0;
    double std_ratio = 0.0;
    /// Queries that returned fewer than k points.
    std::size_t failures = 0;
    /// Queries whose ratio was kInfiniteRatio; excluded from the ratio mean.
    std::size_t inf_ratios = 0;
};

struct QueryRecord {
    std::size_t fold = 0;
    PointId query_id = 0;
    std::string method;  // "<method> <param_label>"
    std::size_t candidates = 0;
    std::optional<double> ratio;  // empty on failure
    std::string termination;
};

struct BenchResult {
    std::vector<CurvePoint> curve;
    std::vector<QueryRecord> queries;
};

/// Row positions of one fold's queries and data. Queries are the first
/// `queries` rows of a seeded shuffle; data rows are the rest, ascending.
struct FoldSplit {
    std::vector<std::size_t> query_rows;
    std::vector<std::size_t> data_rows;
};
FoldSplit fold_split(std::size_t n, std::size_t queries, std::uint64_t seed, std::size_t fold);

/// Cross-validated comparison. Each fold draws `queries_per_fold` query
/// points from the dataset with a fold-derived seed; the rest form that
/// fold's data. Every method runs on every fold with its own derived seed,
/// so results are a pure function of (config, data).
/// Throws std::invalid_argument if no method is configured or the dataset is
/// too small for the split.
BenchResult run_bench(const Dataset& data, const BenchConfig& config);
/// Loads config.data, runs, and writes config.output / config.query_log if set.
BenchResult run_bench(const BenchConfig& config);

inline constexpr const char* kCurveCsvHeader =
    "method,param_label,fold,mean_candidates,std_candidates,mean_ratio,std_ratio,failures,inf_ratios";

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> rows);
void write_query_log(std::ostream& out, std::span<const QueryRecord> records);

}  // namespace dci
