#include "dci/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dci/detail/binary_io.hpp"
#include "dci/rng.hpp"

namespace dci {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& msg) {
    throw std::runtime_error(std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::optional<DatasetFormat> parse_dataset_format(std::string_view name) {
    if (name == "csv") return DatasetFormat::Csv;
    if (name == "bin") return DatasetFormat::PackedBinary;
    return std::nullopt;
}

Dataset read_csv(std::istream& in, LoadOptions opts, std::string_view source) {
    Dataset out;
    std::string line;
    std::vector<double> coords;
    std::size_t line_no = 0;
    PointId next_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;

        coords.clear();
        std::optional<PointId> id;
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view field = trim(rest.substr(0, comma));
            if (opts.id_column && !id) {
                PointId v = 0;
                auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
                if (ec != std::errc() || ptr != field.data() + field.size()) {
                    fail_at(source, line_no, "bad id '" + std::string(field) + "'");
                }
                id = v;
            } else {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
                if (ec != std::errc() || ptr != field.data() + field.size()) {
                    fail_at(source, line_no, "bad number '" + std::string(field) + "'");
                }
                if (!std::isfinite(v)) fail_at(source, line_no, "non-finite value");
                coords.push_back(v);
            }
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (coords.empty()) fail_at(source, line_no, "no coordinates");
        if (!out.empty() && coords.size() != out.dim()) {
            fail_at(source, line_no, "dimension " + std::to_string(coords.size()) + ", expected " +
                                         std::to_string(out.dim()));
        }
        const PointId pid = id ? *id : next_id;
        ++next_id;
        try {
            out.push_back(pid, coords);
        } catch (const std::invalid_argument& e) {
            fail_at(source, line_no, e.what());
        }
    }
    return out;
}

Dataset read_packed_binary(std::istream& in, std::string_view source) {
    Dataset out;
    std::vector<double> coords;
    for (std::size_t rec = 0;; ++rec) {
        std::uint32_t raw_dim = 0;
        const std::string ctx = std::string(source) + ": record " + std::to_string(rec);
        try {
            if (!detail::try_read_le(in, raw_dim, "record header")) break;
            const auto dim = static_cast<std::int32_t>(raw_dim);
            if (dim <= 0) throw std::runtime_error("non-positive dimension " + std::to_string(dim));
            if (!out.empty() && static_cast<std::size_t>(dim) != out.dim()) {
                throw std::runtime_error("dimension " + std::to_string(dim) + ", expected " +
                                         std::to_string(out.dim()));
            }
            coords.resize(static_cast<std::size_t>(dim));
            for (auto& c : coords) {
                const float f = detail::read_f32(in, "record body");
                if (!std::isfinite(f)) throw std::runtime_error("non-finite value");
                c = static_cast<double>(f);
            }
            out.push_back(rec, coords);
        } catch (const std::exception& e) {
            throw std::runtime_error(ctx + ": " + e.what());
        }
    }
    return out;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, LoadOptions opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset " + path.string());
    if (format == DatasetFormat::Csv) return read_csv(in, opts, path.string());
    return read_packed_binary(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& data, bool id_column) {
    char buf[40];
    for (std::size_t r = 0; r < data.size(); ++r) {
        bool first = true;
        if (id_column) {
            out << data.id(r);
            first = false;
        }
        for (double v : data.row(r)) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            if (!first) out << ',';
            out << buf;
            first = false;
        }
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& data, bool id_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(out, data, id_column);
}

void write_packed_binary(std::ostream& out, const Dataset& data) {
    for (std::size_t r = 0; r < data.size(); ++r) {
        detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.dim()));
        for (double v : data.row(r)) {
            detail::write_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
}

void save_packed_binary(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_packed_binary(out, data);
}

std::optional<SynthKind> parse_synth_kind(std::string_view name) {
    if (name == "uniform-cube") return SynthKind::UniformCube;
    if (name == "gaussian-mixture") return SynthKind::GaussianMixture;
    if (name == "two-scale-clusters") return SynthKind::TwoScaleClusters;
    return std::nullopt;
}

std::string_view to_string(SynthKind kind) noexcept {
    switch (kind) {
        case SynthKind::UniformCube: return "uniform-cube";
        case SynthKind::GaussianMixture: return "gaussian-mixture";
        case SynthKind::TwoScaleClusters: return "two-scale-clusters";
    }
    return "unknown";
}

Dataset synth_dataset(SynthKind kind, std::size_t n, std::size_t d, std::uint64_t seed,
                      const SynthOptions& opts) {
    if (n == 0 || d == 0) throw std::invalid_argument("n and d must be positive");
    if (kind != SynthKind::UniformCube && opts.clusters == 0) {
        throw std::invalid_argument("cluster count must be positive");
    }
    Rng rng(seed);
    Dataset out(d);
    out.reserve(n);
    std::vector<double> p(d);

    if (kind == SynthKind::UniformCube) {
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& x : p) x = rng.uniform();
            out.push_back(i, p);
        }
        return out;
    }

    const std::size_t C = opts.clusters;
    std::vector<double> centres(C * d);
    for (auto& x : centres) x = rng.uniform();

    double point_spread = opts.spread;
    if (kind == SynthKind::TwoScaleClusters) {
        std::vector<double> sub(C * C * d);
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t s = 0; s < C; ++s) {
                for (std::size_t i = 0; i < d; ++i) {
                    sub[(c * C + s) * d + i] = centres[c * d + i] + opts.spread * rng.normal();
                }
            }
        }
        centres = std::move(sub);
        point_spread = opts.spread / opts.scale_ratio;
    }

    const std::size_t n_centres = centres.size() / d;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = rng.below(n_centres);
        for (std::size_t j = 0; j < d; ++j) p[j] = centres[c * d + j] + point_spread * rng.normal();
        out.push_back(i, p);
    }
    return out;
}

}  // namespace dci
