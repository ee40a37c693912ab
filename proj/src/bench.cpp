#include "dci/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dci/baselines.hpp"
#include "dci/query.hpp"
#include "dci/rng.hpp"

namespace dci {

double approximation_ratio(std::span<const Neighbour> approx, std::span<const Neighbour> exact) {
    if (approx.size() != exact.size()) {
        throw std::invalid_argument("approximate and exact lists differ in length (" +
                                    std::to_string(approx.size()) + " vs " +
                                    std::to_string(exact.size()) + ")");
    }
    if (exact.empty()) throw std::invalid_argument("empty neighbour lists");
    const double a = approx.back().dist;
    const double e = exact.back().dist;
    if (e == 0.0) return a == 0.0 ? 1.0 : kInfiniteRatio;
    return a / e;
}

// ---------------------------------------------------------------- config

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("config key '" + key + "': bad value '" + v + "'");
    }
    return out;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key, const std::string& v) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in, const std::filesystem::path& base_dir) {
    BenchConfig cfg;
    DciBenchConfig dci_cfg;
    LshBenchConfig lsh_cfg;
    std::vector<std::string> methods{"exact", "dci-fixed", "dci-adaptive", "lsh"};

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "data") cfg.data = resolve(value);
        else if (key == "format") {
            auto f = parse_dataset_format(value);
            if (!f) throw std::invalid_argument("config key 'format': expected csv or bin");
            cfg.format = *f;
        }
        else if (key == "id_column") cfg.id_column = parse_bool(key, value);
        else if (key == "k") cfg.k = parse_number<std::size_t>(key, value);
        else if (key == "folds") cfg.folds = parse_number<std::size_t>(key, value);
        else if (key == "queries_per_fold") cfg.queries_per_fold = parse_number<std::size_t>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "output") cfg.output = resolve(value);
        else if (key == "log") cfg.query_log = resolve(value);
        else if (key == "methods") methods = split_list(value);
        else if (key == "dci_m") dci_cfg.params.m = parse_number<std::size_t>(key, value);
        else if (key == "dci_L") dci_cfg.params.L = parse_number<std::size_t>(key, value);
        else if (key == "dci_k_tilde") {
            dci_cfg.k_tilde = value == "auto" ? std::vector<std::size_t>{}
                                              : parse_number_list<std::size_t>(key, value);
        }
        else if (key == "dci_epsilon") dci_cfg.epsilons = parse_number_list<double>(key, value);
        else if (key == "lsh_H") lsh_cfg.hashes_per_table = parse_number<std::size_t>(key, value);
        else if (key == "lsh_T") lsh_cfg.tables = parse_number<std::size_t>(key, value);
        else if (key == "lsh_w") {
            lsh_cfg.widths = value == "auto" ? std::vector<double>{} : parse_number_list<double>(key, value);
        }
        else if (key == "lsh_w_multipliers") lsh_cfg.width_multipliers = parse_number_list<double>(key, value);
        else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }

    cfg.exact = false;
    dci_cfg.fixed = dci_cfg.adaptive = false;
    bool use_lsh = false;
    for (const auto& m : methods) {
        if (m == "exact") cfg.exact = true;
        else if (m == "dci-fixed") dci_cfg.fixed = true;
        else if (m == "dci-adaptive") dci_cfg.adaptive = true;
        else if (m == "lsh") use_lsh = true;
        else throw std::invalid_argument("unknown method '" + m + "'");
    }
    cfg.dci = (dci_cfg.fixed || dci_cfg.adaptive) ? std::optional(dci_cfg) : std::nullopt;
    cfg.lsh = use_lsh ? std::optional(lsh_cfg) : std::nullopt;
    return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bench config " + path.string());
    return parse_bench_config(in, path.parent_path());
}

// ---------------------------------------------------------------- running

namespace {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct Sample {
    std::size_t candidates = 0;
    std::optional<double> ratio;
};

struct MeanStd {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std = std::numeric_limits<double>::quiet_NaN();
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    const double n = static_cast<double>(xs.size());
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / n);
    return out;
}

// Per-fold samples for one (method, param_label) cell, in insertion order.
class CurveTable {
public:
    std::vector<Sample>& cell(const std::string& method, const std::string& label, std::size_t fold) {
        const auto key = std::make_pair(method, label);
        auto it = index_.find(key);
        if (it == index_.end()) {
            it = index_.emplace(key, keys_.size()).first;
            keys_.push_back(key);
            cells_.emplace_back();
        }
        auto& folds = cells_[it->second];
        if (folds.size() <= fold) folds.resize(fold + 1);
        return folds[fold];
    }

    std::vector<CurvePoint> rows(std::size_t folds) const {
        std::vector<CurvePoint> out;
        std::vector<CurvePoint> aggregate;
        for (std::size_t f = 0; f < folds; ++f) {
            for (std::size_t c = 0; c < keys_.size(); ++c) {
                if (f < cells_[c].size()) out.push_back(summarize(c, std::to_string(f), cells_[c][f]));
            }
        }
        for (std::size_t c = 0; c < keys_.size(); ++c) {
            std::vector<double> cand_means, ratio_means;
            CurvePoint all{keys_[c].first, keys_[c].second, "all"};
            for (const auto& samples : cells_[c]) {
                const CurvePoint p = summarize(c, "", samples);
                cand_means.push_back(p.mean_candidates);
                if (!std::isnan(p.mean_ratio)) ratio_means.push_back(p.mean_ratio);
                all.failures += p.failures;
                all.inf_ratios += p.inf_ratios;
            }
            const auto cm = mean_std(cand_means);
            const auto rm = mean_std(ratio_means);
            all.mean_candidates = cm.mean;
            all.std_candidates = cm.std;
            all.mean_ratio = rm.mean;
            all.std_ratio = rm.std;
            out.push_back(all);
        }
        return out;
    }

private:
    CurvePoint summarize(std::size_t c, std::string fold, const std::vector<Sample>& samples) const {
        CurvePoint p{keys_[c].first, keys_[c].second, std::move(fold)};
        std::vector<double> cands, ratios;
        for (const auto& s : samples) {
            cands.push_back(static_cast<double>(s.candidates));
            if (!s.ratio) ++p.failures;
            else if (std::isinf(*s.ratio)) ++p.inf_ratios;
            else ratios.push_back(*s.ratio);
        }
        const auto cm = mean_std(cands);
        const auto rm = mean_std(ratios);
        p.mean_candidates = cm.mean;
        p.std_candidates = cm.std;
        p.mean_ratio = rm.mean;
        p.std_ratio = rm.std;
        return p;
    }

    std::map<std::pair<std::string, std::string>, std::size_t> index_;
    std::vector<std::pair<std::string, std::string>> keys_;
    std::vector<std::vector<std::vector<Sample>>> cells_;
};

std::vector<std::size_t> default_k_tilde_grid(std::size_t k, std::size_t n) {
    std::vector<std::size_t> grid;
    for (std::size_t b = k; b < n; b *= 2) grid.push_back(b);
    grid.push_back(n);
    return grid;
}

double median_pairwise_distance(const Dataset& data, Rng& rng) {
    constexpr std::size_t kPairs = 2000;
    std::vector<double> d;
    d.reserve(kPairs);
    for (std::size_t t = 0; t < kPairs; ++t) {
        const auto a = rng.below(data.size());
        auto b = rng.below(data.size() - 1);
        if (b >= a) ++b;
        d.push_back(distance(data.row(a), data.row(b)));
    }
    std::nth_element(d.begin(), d.begin() + kPairs / 2, d.end());
    return d[kPairs / 2];
}

enum Stream : std::uint64_t { kSplit = 1, kDciIndex = 2, kWidthSample = 3, kLshBase = 100 };

}  // namespace

FoldSplit fold_split(std::size_t n, std::size_t queries, std::uint64_t seed, std::size_t fold) {
    if (queries > n) throw std::invalid_argument("more queries than points");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(derive_seed(seed, fold), kSplit));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    FoldSplit out;
    out.query_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(queries));
    out.data_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(queries), order.end());
    std::sort(out.data_rows.begin(), out.data_rows.end());
    return out;
}

BenchResult run_bench(const Dataset& data, const BenchConfig& cfg) {
    if (!cfg.exact && !cfg.dci && !cfg.lsh) throw std::invalid_argument("no benchmark method configured");
    if (cfg.dci && !cfg.dci->fixed && !cfg.dci->adaptive) throw std::invalid_argument("empty DCI grid");
    if (cfg.dci && cfg.dci->adaptive && cfg.dci->epsilons.empty()) {
        throw std::invalid_argument("empty DCI epsilon grid");
    }
    if (cfg.lsh && cfg.lsh->widths.empty() && cfg.lsh->width_multipliers.empty()) {
        throw std::invalid_argument("empty LSH width grid");
    }
    if (cfg.k == 0 || cfg.folds == 0 || cfg.queries_per_fold == 0) {
        throw std::invalid_argument("k, folds and queries_per_fold must be positive");
    }
    if (data.size() < cfg.queries_per_fold + cfg.k) {
        throw std::invalid_argument("dataset of " + std::to_string(data.size()) +
                                    " points is too small for " + std::to_string(cfg.queries_per_fold) +
                                    " queries per fold and k = " + std::to_string(cfg.k));
    }

    const std::size_t k = cfg.k;
    CurveTable table;
    BenchResult result;

    for (std::size_t fold = 0; fold < cfg.folds; ++fold) {
        const std::uint64_t fold_seed = derive_seed(cfg.seed, fold);
        const FoldSplit split = fold_split(data.size(), cfg.queries_per_fold, cfg.seed, fold);
        const auto& query_rows = split.query_rows;
        const Dataset fold_data = data.subset(split.data_rows);
        const std::size_t n_data = fold_data.size();

        std::vector<std::vector<Neighbour>> exact(query_rows.size());
        for (std::size_t qi = 0; qi < query_rows.size(); ++qi) {
            exact[qi] = brute_force_knn(fold_data, data.row(query_rows[qi]), k);
        }

        auto record = [&](const std::string& method, const std::string& label, std::size_t qi,
                          std::size_t candidates, std::span<const Neighbour> got, std::string termination) {
            Sample s{candidates, std::nullopt};
            if (got.size() == k) s.ratio = approximation_ratio(got, exact[qi]);
            table.cell(method, label, fold).push_back(s);
            result.queries.push_back(QueryRecord{fold, data.id(query_rows[qi]), method + " " + label,
                                                 candidates, s.ratio, std::move(termination)});
        };

        if (cfg.exact) {
            for (std::size_t qi = 0; qi < query_rows.size(); ++qi) {
                record("exact", "scan", qi, n_data, exact[qi], "Exhaustive");
            }
        }

        if (cfg.dci) {
            const auto& dc = *cfg.dci;
            const DciIndex index = DciIndex::construct(fold_data, dc.params, derive_seed(fold_seed, kDciIndex));
            const std::string shape = "m=" + std::to_string(dc.params.m) + " L=" + std::to_string(dc.params.L);
            if (dc.fixed) {
                std::vector<std::size_t> grid = dc.k_tilde.empty() ? default_k_tilde_grid(k, n_data) : dc.k_tilde;
                for (auto& b : grid) b = std::clamp(b, k, n_data);
                std::sort(grid.begin(), grid.end());
                grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
                for (std::size_t qi = 0; qi < query_rows.size(); ++qi) {
                    const auto reports = query_budget_sweep(index, data.row(query_rows[qi]), k, grid);
                    for (std::size_t g = 0; g < grid.size(); ++g) {
                        record("dci-fixed", shape + " k_tilde=" + std::to_string(grid[g]), qi,
                               reports[g].unique_candidates, reports[g].neighbours,
                               std::string(to_string(reports[g].termination)));
                    }
                }
            }
            if (dc.adaptive) {
                for (double eps : dc.epsilons) {
                    const std::string label = shape + " epsilon=" + format_number(eps);
                    for (std::size_t qi = 0; qi < query_rows.size(); ++qi) {
                        const auto rep = query(index, data.row(query_rows[qi]), QueryParams{k, Adaptive{eps}});
                        record("dci-adaptive", label, qi, rep.unique_candidates, rep.neighbours,
                               std::string(to_string(rep.termination)));
                    }
                }
            }
        }

        if (cfg.lsh) {
            const auto& lc = *cfg.lsh;
            std::vector<std::pair<double, std::string>> widths;
            if (!lc.widths.empty()) {
                for (double w : lc.widths) widths.emplace_back(w, "w=" + format_number(w));
            } else {
                Rng wrng(derive_seed(fold_seed, kWidthSample));
                const double base = median_pairwise_distance(fold_data, wrng) /
                                    std::sqrt(static_cast<double>(lc.hashes_per_table));
                for (double mul : lc.width_multipliers) {
                    widths.emplace_back(mul * base, "w=" + format_number(mul) + "x");
                }
            }
            const std::string shape = "H=" + std::to_string(lc.hashes_per_table) + " T=" + std::to_string(lc.tables);
            for (std::size_t wi = 0; wi < widths.size(); ++wi) {
                const LshIndex lsh(fold_data, LshParams{lc.hashes_per_table, lc.tables, widths[wi].first},
                                   derive_seed(fold_seed, kLshBase + wi));
                const std::string label = shape + " " + widths[wi].second;
                for (std::size_t qi = 0; qi < query_rows.size(); ++qi) {
                    const auto res = lsh.query(data.row(query_rows[qi]), k);
                    record("lsh", label, qi, res.unique_candidates, res.neighbours,
                           res.neighbours.size() == k ? "Complete" : "Failed");
                }
            }
        }
    }

    result.curve = table.rows(cfg.folds);
    return result;
}

BenchResult run_bench(const BenchConfig& config) {
    const Dataset data = load_dataset(config.data, config.format, LoadOptions{config.id_column});
    BenchResult res = run_bench(data, config);
    if (!config.output.empty()) {
        std::ofstream out(config.output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + config.output.string() + " for writing");
        write_curve_csv(out, res.curve);
    }
    if (!config.query_log.empty()) {
        std::ofstream out(config.query_log, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + config.query_log.string() + " for writing");
        write_query_log(out, res.queries);
    }
    return res;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> rows) {
    out << kCurveCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.method << ',' << r.param_label << ',' << r.fold << ',' << format_number(r.mean_candidates)
            << ',' << format_number(r.std_candidates) << ',' << format_number(r.mean_ratio) << ','
            << format_number(r.std_ratio) << ',' << r.failures << ',' << r.inf_ratios << '\n';
    }
}

void write_query_log(std::ostream& out, std::span<const QueryRecord> records) {
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["fold"] = r.fold;
        j["query_id"] = r.query_id;
        j["method"] = r.method;
        j["candidates"] = r.candidates;
        if (!r.ratio) j["ratio"] = nullptr;
        else if (std::isinf(*r.ratio)) j["ratio"] = "inf";
        else j["ratio"] = *r.ratio;
        j["termination"] = r.termination;
        out << j.dump() << '\n';
    }
}

}  // namespace dci
