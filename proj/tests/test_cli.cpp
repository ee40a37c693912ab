#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "dci/baselines.hpp"
#include "dci/bench.hpp"
#include "dci/dataset_io.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Run {
    int status = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Workdir {
public:
    Workdir() : dir_(fs::temp_directory_path() / ("dci_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
    }
    ~Workdir() { fs::remove_all(dir_); }
    fs::path operator/(const std::string& name) const { return dir_ / name; }

    Run dci(const std::string& args) const {
        const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        const std::string cmd = std::string(DCI_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
        const int raw = std::system(cmd.c_str());
        return Run{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }

private:
    fs::path dir_;
};

}  // namespace

TEST_CASE("cli build echoes the shape and prints the seed") {
    Workdir w;
    w.write("pts.csv", "0,0\n1,0\n0,1\n1,1\n");
    const auto r = w.dci("build --data " + (w / "pts.csv").string() + " --m 2 --L 2 --seed 5 --out " +
                         (w / "idx.bin").string());
    REQUIRE(r.status == 0);
    CHECK_THAT(r.out, ContainsSubstring("n=4"));
    CHECK_THAT(r.out, ContainsSubstring("m=2 L=2"));
    CHECK_THAT(r.err, ContainsSubstring("seed: 5"));
    CHECK(fs::exists(w / "idx.bin"));
}

TEST_CASE("cli build of a missing file fails naming the path") {
    Workdir w;
    const auto r = w.dci("build --data /nonexistent/pts.csv --out " + (w / "idx.bin").string());
    CHECK(r.status != 0);
    CHECK_THAT(r.err, ContainsSubstring("/nonexistent/pts.csv"));
}

TEST_CASE("cli build reports the failing line of a bad file") {
    Workdir w;
    w.write("bad.csv", "0,0\n1\n");
    const auto r = w.dci("build --data " + (w / "bad.csv").string() + " --out " + (w / "idx.bin").string());
    CHECK(r.status != 0);
    CHECK_THAT(r.err, ContainsSubstring("bad.csv:2"));
}

TEST_CASE("cli rebuild is byte-identical") {
    Workdir w;
    const auto data = dci::synth_dataset(dci::SynthKind::UniformCube, 100, 4, 3);
    dci::save_csv(w / "pts.csv", data);
    const std::string base = "build --data " + (w / "pts.csv").string() + " --m 3 --L 2 --seed 9 --out ";
    REQUIRE(w.dci(base + (w / "a.bin").string()).status == 0);
    REQUIRE(w.dci(base + (w / "b.bin").string()).status == 0);
    CHECK(slurp(w / "a.bin") == slurp(w / "b.bin"));
}

TEST_CASE("cli query returns the brute-force nearest point") {
    Workdir w;
    w.write("pts.csv", "0,0\n1,0\n5,5\n");
    REQUIRE(w.dci("build --data " + (w / "pts.csv").string() + " --m 2 --L 1 --out " + (w / "i.bin").string())
                .status == 0);
    const auto r = w.dci("query --index " + (w / "i.bin").string() + " --q 0.9,0.2 --k 1 --k-tilde 3");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto data = dci::load_dataset(w / "pts.csv", dci::DatasetFormat::Csv);
    const auto exact = dci::brute_force_knn(data, std::vector<double>{0.9, 0.2}, 1);
    CHECK(j["neighbours"][0]["id"] == exact[0].id);
    CHECK(j["neighbours"][0]["dist"].get<double>() == Catch::Approx(exact[0].dist));
    CHECK(j.contains("candidates"));
    CHECK(j.contains("iterations"));
    CHECK(j.contains("termination"));
}

TEST_CASE("cli adaptive query stops early on clustered data") {
    Workdir w;
    dci::save_csv(w / "pts.csv", dci::synth_dataset(dci::SynthKind::TwoScaleClusters, 2000, 10, 4));
    REQUIRE(w.dci("build --data " + (w / "pts.csv").string() + " --m 2 --L 2 --out " + (w / "i.bin").string())
                .status == 0);
    std::ifstream in(w / "pts.csv");
    std::string first;
    std::getline(in, first);
    const auto r = w.dci("query --index " + (w / "i.bin").string() + " --q " + first + " --k 1 --epsilon 0.9");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["termination"] == "TestPassed");
    CHECK(j["candidates"].get<int>() < 2000);
}

TEST_CASE("cli query from a file prints one line per vector") {
    Workdir w;
    w.write("pts.csv", "0,0\n1,0\n5,5\n");
    w.write("q.csv", "0,0\n5,4\n");
    REQUIRE(w.dci("build --data " + (w / "pts.csv").string() + " --out " + (w / "i.bin").string()).status == 0);
    const auto r = w.dci("query --index " + (w / "i.bin").string() + " --q-file " + (w / "q.csv").string() +
                         " --k 1 --epsilon 0.5");
    REQUIRE(r.status == 0);
    std::istringstream lines(r.out);
    std::string a, b;
    std::getline(lines, a);
    std::getline(lines, b);
    CHECK(nlohmann::json::parse(a)["neighbours"][0]["id"] == 0);
    CHECK(nlohmann::json::parse(b)["neighbours"][0]["id"] == 2);
}

TEST_CASE("cli query mode flags are mutually exclusive") {
    Workdir w;
    w.write("pts.csv", "0,0\n1,0\n5,5\n");
    REQUIRE(w.dci("build --data " + (w / "pts.csv").string() + " --out " + (w / "i.bin").string()).status == 0);
    const std::string base = "query --index " + (w / "i.bin").string() + " --q 0,0 --k 1";
    const auto both = w.dci(base + " --k-tilde 3 --epsilon 0.1");
    CHECK(both.status != 0);
    CHECK_THAT(both.err, ContainsSubstring("usage"));
    CHECK(w.dci(base).status != 0);
    CHECK(w.dci(base + " --k-tilde 3 --q-file x.csv").status != 0);
    const auto dim = w.dci("query --index " + (w / "i.bin").string() + " --q 0,0,0 --k 1 --epsilon 0.1");
    CHECK(dim.status != 0);
    CHECK_THAT(dim.err, ContainsSubstring("dimension"));
}

TEST_CASE("cli rejects unknown flags and subcommands") {
    Workdir w;
    CHECK(w.dci("build --data x --out y --colour red").status != 0);
    CHECK(w.dci("serve").status != 0);
    CHECK(w.dci("").status != 0);
}

TEST_CASE("cli sparsity on a regular simplex prints gamma 1") {
    Workdir w;
    std::string text;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) text += (j ? "," : "") + std::string(i == j ? "1" : "0");
        text += "\n";
    }
    w.write("simplex.csv", text);
    const auto r = w.dci("sparsity --data " + (w / "simplex.csv").string() + " --tau 1");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["gamma"].get<double>() == 1.0);
    CHECK(j["intrinsic_dim"] == "inf");
    CHECK_THAT(r.err, ContainsSubstring("seed"));
}

TEST_CASE("cli synth then bench writes the specified csv header") {
    Workdir w;
    const auto s = w.dci("synth --kind gaussian-mixture --n 600 --d 8 --seed 2 --out " + (w / "g.bin").string() +
                         " --format bin");
    REQUIRE(s.status == 0);
    CHECK_THAT(s.out, ContainsSubstring("n=600 d=8"));
    w.write("bench.cfg",
            "data = g.bin\nformat = bin\nk = 5\nfolds = 2\nqueries_per_fold = 10\nseed = 3\n"
            "lsh_T = 5\noutput = curve.csv\nlog = queries.jsonl\n");
    const auto r = w.dci("bench --config " + (w / "bench.cfg").string());
    REQUIRE(r.status == 0);
    CHECK_THAT(r.err, ContainsSubstring("seed: 3"));
    const std::string csv = slurp(w / "curve.csv");
    CHECK(csv.substr(0, csv.find('\n')) == dci::kCurveCsvHeader);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "method,param_label,fold,mean_candidates,std_candidates,mean_ratio,std_ratio,failures,inf_ratios");
    CHECK_THAT(csv, ContainsSubstring("\nexact,scan,all,590,0,1,0,0,0\n"));

    std::istringstream log(slurp(w / "queries.jsonl"));
    std::string line;
    std::getline(log, line);
    const auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"fold", "query_id", "method", "candidates", "ratio", "termination"});

    const auto again = w.dci("bench --config " + (w / "bench.cfg").string());
    REQUIRE(again.status == 0);
    CHECK(slurp(w / "curve.csv") == csv);
}

TEST_CASE("cli bench config errors exit nonzero") {
    Workdir w;
    w.write("bad.cfg", "data = nowhere.csv\nspeed = fast\n");
    const auto r = w.dci("bench --config " + (w / "bad.cfg").string());
    CHECK(r.status != 0);
    CHECK_THAT(r.err, ContainsSubstring("speed"));
}
