#include <catch_amalgamated.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "dci/analysis.hpp"
#include "dci/dataset_io.hpp"
#include "dci/rng.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

std::string le32(std::uint32_t v) {
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return s;
}

std::string le_float(float f) { return le32(std::bit_cast<std::uint32_t>(f)); }

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("dci_test_" + name);
}

}  // namespace

TEST_CASE("csv basic example") {
    std::istringstream in("1.0,2.0\n3.0,4.0");
    const auto ds = dci::read_csv(in);
    REQUIRE(ds.size() == 2);
    CHECK(ds.dim() == 2);
    CHECK(ds.id(0) == 0);
    CHECK(ds.id(1) == 1);
    CHECK(ds.row(1)[0] == 3.0);
    CHECK(ds.row(1)[1] == 4.0);
}

TEST_CASE("csv with id column, blank lines and spaces") {
    std::istringstream in("7, 0.5, -1e3\n\n  3,2,2\r\n");
    const auto ds = dci::read_csv(in, {true});
    REQUIRE(ds.size() == 2);
    CHECK(ds.dim() == 2);
    CHECK(ds.id(0) == 7);
    CHECK(ds.row(0)[1] == -1000.0);
    CHECK(ds.id(1) == 3);
}

TEST_CASE("csv errors report the line") {
    std::istringstream ragged("1,2\n3,4\n5\n");
    CHECK_THROWS_WITH(dci::read_csv(ragged, {}, "pts.csv"), ContainsSubstring("pts.csv:3"));
    std::istringstream junk("1,2\n1,x\n");
    CHECK_THROWS_WITH(dci::read_csv(junk, {}, "pts.csv"), ContainsSubstring("pts.csv:2"));
    std::istringstream nonfinite("inf,1\n");
    CHECK_THROWS_WITH(dci::read_csv(nonfinite, {}, "pts.csv"), ContainsSubstring("pts.csv:1"));
    std::istringstream nan("1,nan\n");
    CHECK_THROWS_AS(dci::read_csv(nan), std::runtime_error);
}

TEST_CASE("binary record example") {
    std::istringstream in(le32(2) + le_float(1.0f) + le_float(2.0f));
    const auto ds = dci::read_packed_binary(in);
    REQUIRE(ds.size() == 1);
    CHECK(ds.dim() == 2);
    CHECK(ds.row(0)[0] == 1.0);
    CHECK(ds.row(0)[1] == 2.0);
}

TEST_CASE("binary errors") {
    SECTION("truncated body") {
        std::istringstream in(le32(2) + le_float(1.0f) + le_float(2.0f) + le32(2) + le_float(3.0f));
        CHECK_THROWS_WITH(dci::read_packed_binary(in, "v.bin"), ContainsSubstring("record 1"));
    }
    SECTION("truncated header") {
        std::istringstream in(le32(1) + le_float(1.0f) + std::string("\x01\x00", 2));
        CHECK_THROWS_WITH(dci::read_packed_binary(in), ContainsSubstring("truncated"));
    }
    SECTION("inconsistent dimension") {
        std::istringstream in(le32(1) + le_float(1.0f) + le32(2) + le_float(1.0f) + le_float(1.0f));
        CHECK_THROWS_WITH(dci::read_packed_binary(in), ContainsSubstring("record 1"));
    }
    SECTION("non-finite value") {
        std::istringstream in(le32(1) + le_float(std::numeric_limits<float>::infinity()));
        CHECK_THROWS_WITH(dci::read_packed_binary(in), ContainsSubstring("non-finite"));
    }
}

TEST_CASE("missing file names the path") {
    CHECK_THROWS_WITH(dci::load_dataset("/nonexistent/points.csv", dci::DatasetFormat::Csv),
                      ContainsSubstring("/nonexistent/points.csv"));
}

TEST_CASE("image-style export matches an independent byte-level reader") {
    const std::size_t n = 2000, d = 784;
    const auto path = temp_path("images.bin");
    {
        dci::Rng rng(1);
        std::ofstream out(path, std::ios::binary);
        for (std::size_t i = 0; i < n; ++i) {
            out << le32(d);
            for (std::size_t j = 0; j < d; ++j) out << le_float(static_cast<float>(rng.below(256)) / 255.0f);
        }
    }

    // Independent reader: raw bytes, memcpy of the first record only.
    std::ifstream raw(path, std::ios::binary);
    std::vector<char> head(4 + 4 * d);
    raw.read(head.data(), static_cast<std::streamsize>(head.size()));
    std::int32_t dim = 0;
    std::memcpy(&dim, head.data(), 4);
    REQUIRE(dim == static_cast<std::int32_t>(d));
    double expect_sum = 0.0;
    std::uint64_t expect_hash = 1469598103934665603ULL;
    for (std::size_t j = 0; j < d; ++j) {
        float f;
        std::memcpy(&f, head.data() + 4 + 4 * j, 4);
        expect_sum += f;
        expect_hash = (expect_hash ^ std::bit_cast<std::uint32_t>(f)) * 1099511628211ULL;
    }

    const auto ds = dci::load_dataset(path, dci::DatasetFormat::PackedBinary);
    REQUIRE(ds.size() == n);
    REQUIRE(ds.dim() == d);
    double sum = 0.0;
    std::uint64_t hash = 1469598103934665603ULL;
    for (double v : ds.row(0)) {
        sum += v;
        hash = (hash ^ std::bit_cast<std::uint32_t>(static_cast<float>(v))) * 1099511628211ULL;
    }
    CHECK(sum == expect_sum);
    CHECK(hash == expect_hash);
    std::filesystem::remove(path);
}

TEST_CASE("csv and binary writers round trip") {
    const auto data = dci::synth_dataset(dci::SynthKind::GaussianMixture, 50, 3, 2);
    std::stringstream csv;
    dci::write_csv(csv, data, true);
    const auto back = dci::read_csv(csv, {true});
    REQUIRE(back.size() == 50);
    CHECK(std::equal(back.coords().begin(), back.coords().end(), data.coords().begin()));
    CHECK(std::equal(back.ids().begin(), back.ids().end(), data.ids().begin()));

    std::stringstream bin;
    dci::write_packed_binary(bin, data);
    const auto fb = dci::read_packed_binary(bin);
    REQUIRE(fb.size() == 50);
    for (std::size_t i = 0; i < data.coords().size(); ++i) {
        REQUIRE(fb.coords()[i] == static_cast<double>(static_cast<float>(data.coords()[i])));
    }
}

TEST_CASE("synthetic data is reproducible") {
    const auto a = dci::synth_dataset(dci::SynthKind::UniformCube, 4, 1, 77);
    const auto b = dci::synth_dataset(dci::SynthKind::UniformCube, 4, 1, 77);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.row(i)[0] == b.row(i)[0]);
        CHECK(a.row(i)[0] >= 0.0);
        CHECK(a.row(i)[0] < 1.0);
    }
    const auto c = dci::synth_dataset(dci::SynthKind::UniformCube, 4, 1, 78);
    CHECK(c.row(0)[0] != a.row(0)[0]);
}

TEST_CASE("one cluster with zero spread is n copies of one point") {
    dci::SynthOptions opts;
    opts.clusters = 1;
    opts.spread = 0.0;
    const auto ds = dci::synth_dataset(dci::SynthKind::GaussianMixture, 10, 3, 5, opts);
    for (std::size_t i = 1; i < 10; ++i) {
        CHECK(std::equal(ds.row(i).begin(), ds.row(i).end(), ds.row(0).begin()));
    }
}

TEST_CASE("synth argument errors and names") {
    CHECK_THROWS_AS(dci::synth_dataset(dci::SynthKind::UniformCube, 0, 2, 1), std::invalid_argument);
    dci::SynthOptions none;
    none.clusters = 0;
    CHECK_THROWS_AS(dci::synth_dataset(dci::SynthKind::GaussianMixture, 5, 2, 1, none), std::invalid_argument);
    CHECK(dci::parse_synth_kind("two-scale-clusters") == dci::SynthKind::TwoScaleClusters);
    CHECK_FALSE(dci::parse_synth_kind("blobs").has_value());
    CHECK(dci::parse_dataset_format("bin") == dci::DatasetFormat::PackedBinary);
    CHECK_FALSE(dci::parse_dataset_format("fvecs").has_value());
}
