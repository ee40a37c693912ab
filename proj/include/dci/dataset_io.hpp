#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "dci/point.hpp"

namespace dci {

enum class DatasetFormat {
    Csv,           // one point per line, comma-separated reals
    PackedBinary,  // per vector: int32 d, then d float32, little-endian
};

/// Parses "csv" or "bin"; std::nullopt for anything else.
std::optional<DatasetFormat> parse_dataset_format(std::string_view name);

struct LoadOptions {
    /// CSV only: the first column is an integer id rather than a coordinate.
    bool id_column = false;
};

/// Ids default to 0..n-1 in file order. Throws std::runtime_error with the
/// path and line (CSV) or record (binary) on inconsistent dimensions,
/// truncated records, unparsable or non-finite values.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, LoadOptions opts = {});
Dataset read_csv(std::istream& in, LoadOptions opts = {}, std::string_view source = "<stream>");
Dataset read_packed_binary(std::istream& in, std::string_view source = "<stream>");

/// Writes coordinates with round-trip precision; ids as a leading column when requested.
void write_csv(std::ostream& out, const Dataset& data, bool id_column = false);
void save_csv(const std::filesystem::path& path, const Dataset& data, bool id_column = false);
/// Narrows to float32.
void write_packed_binary(std::ostream& out, const Dataset& data);
void save_packed_binary(const std::filesystem::path& path, const Dataset& data);

enum class SynthKind { UniformCube, GaussianMixture, TwoScaleClusters };

/// "uniform-cube", "gaussian-mixture", "two-scale-clusters".
std::optional<SynthKind> parse_synth_kind(std::string_view name);
std::string_view to_string(SynthKind kind) noexcept;

struct SynthOptions {
    std::size_t clusters = 10;
    /// Standard deviation of points around their cluster centre. Centres are
    /// uniform in the unit cube.
    double spread = 0.05;
    /// two-scale-clusters: each cluster holds `clusters` sub-clusters spread
    /// `spread` around it, whose points are spread `spread / scale_ratio`.
    double scale_ratio = 10.0;
};

/// Deterministic given the seed; ids 0..n-1.
///   uniform-cube:       coordinates uniform in [0, 1)
///   gaussian-mixture:   each point picks a centre uniformly and adds N(0, spread^2 I)
///   two-scale-clusters: clusters of tight sub-clusters
Dataset synth_dataset(SynthKind kind, std::size_t n, std::size_t d, std::uint64_t seed,
                      const SynthOptions& opts = {});

}  // namespace dci
