// nnmetric: end-to-end tests of the command-line tool (subprocess driven).
// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnmetric/nnmetric.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = NNMETRIC_CLI_PATH;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() /
              ("nnmetric_cli_" + std::to_string(::getpid()) + "_" +
               std::to_string(reinterpret_cast<std::uintptr_t>(this) & 0xffff));
        fs::create_directories(dir);
    }
    ~Sandbox() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

/// Runs the CLI with the given arguments; returns the exit code and captures
/// combined stdout/stderr into `output`.
int run_cli(const Sandbox& box, const std::string& args, std::string* output = nullptr) {
    const std::string log = box.path("last_output.txt");
    const std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("cli gen: deterministic, correct collinear content") {
    Sandbox box;
    REQUIRE(run_cli(box, "gen --kind collinear --n 3 --d 2 --seed 5 --out " + box.path("a.csv")) ==
            0);
    REQUIRE(run_cli(box, "gen --kind collinear --n 3 --d 2 --seed 5 --out " + box.path("b.csv")) ==
            0);
    CHECK(slurp(box.path("a.csv")) == slurp(box.path("b.csv")));

    const nnm::PointsFile pf = nnm::read_points_csv(box.path("a.csv"));
    CHECK(pf.dim == 2);
    CHECK(pf.flat == std::vector<double>{0.0, 0.0, 1.0, 0.0, 2.0, 0.0});

    SECTION("different seed changes uniform output") {
        REQUIRE(run_cli(box, "gen --kind uniform --n 8 --seed 1 --out " + box.path("u1.csv")) == 0);
        REQUIRE(run_cli(box, "gen --kind uniform --n 8 --seed 2 --out " + box.path("u2.csv")) == 0);
        CHECK(slurp(box.path("u1.csv")) != slurp(box.path("u2.csv")));
    }

    SECTION("bad kind is a usage error") {
        std::string out;
        CHECK(run_cli(box, "gen --kind blobs --out " + box.path("x.csv"), &out) == 1);
    }
}

TEST_CASE("cli dist: approx3 on the collinear triple") {
    Sandbox box;
    REQUIRE(run_cli(box, "gen --kind collinear --n 3 --d 2 --seed 0 --out " + box.path("p.csv")) ==
            0);
    const std::string rj = box.path("r.json");
    REQUIRE(run_cli(box, "dist --input " + box.path("p.csv") +
                             " --algorithm approx3 --pairs 0:2 --out " + rj) == 0);
    const json doc = load_json(rj);
    CHECK(doc["schema"] == "nnmetric-v1");
    CHECK(doc["algorithm"] == "approx3");
    REQUIRE(doc["results"].size() == 1);
    const json& r = doc["results"][0];
    CHECK(r["i"] == 0);
    CHECK(r["j"] == 2);
    CHECK(r["estimate"].get<double>() == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(r["lower"].get<double>() <= r["estimate"].get<double>());
    CHECK(r["estimate"].get<double>() <= r["upper"].get<double>());
    CHECK(r["witness_sites"] == json({0, 1, 2}));
    CHECK(r.contains("runtime_ms"));

    SECTION("identical results on a second run (runtimes aside)") {
        const std::string rj2 = box.path("r2.json");
        REQUIRE(run_cli(box, "dist --input " + box.path("p.csv") +
                                 " --algorithm approx3 --pairs 0:2 --out " + rj2) == 0);
        json a = load_json(rj);
        json b = load_json(rj2);
        for (json* d : {&a, &b})
            for (json& rec : (*d)["results"]) rec.erase("runtime_ms");
        CHECK(a == b);
    }
}

TEST_CASE("cli dist: ptas echoes the delta derived from epsilon") {
    Sandbox box;
    std::ofstream(box.path("two.csv")) << "0,0\n2,0\n";
    const std::string rj = box.path("r.json");
    REQUIRE(run_cli(box, "dist --input " + box.path("two.csv") +
                             " --algorithm ptas --epsilon 0.25 --c4 1 --pairs 0:1 --out " + rj) ==
            0);
    const json doc = load_json(rj);
    // epsilon_to_delta(0.25, C4=1) = min(0.1, 0.25^1.5) = 0.1 (clamped).
    CHECK(doc["parameters"]["delta"].get<double>() == 0.1);
    const json& r = doc["results"][0];
    CHECK(r["delta"].get<double>() == 0.1);
    CHECK(r["epsilon"].get<double>() == 0.25);
    CHECK(r["estimate"].get<double>() == Catch::Approx(1.0).margin(0.05));
    CHECK(r["lower"].get<double>() <= r["estimate"].get<double>());
    CHECK(r["estimate"].get<double>() <= r["upper"].get<double>());
    CHECK(r.contains("witness_edge_types"));
}

TEST_CASE("cli dist: oracle mode emits resolution and error allowance") {
    Sandbox box;
    std::ofstream(box.path("two.csv")) << "0,0\n2,0\n";
    const std::string rj = box.path("r.json");
    REQUIRE(run_cli(box, "dist --input " + box.path("two.csv") +
                             " --algorithm oracle --resolution 64 --pairs 0:1 --out " + rj) == 0);
    const json doc = load_json(rj);
    const json& r = doc["results"][0];
    CHECK(r["resolution"] == 64);
    CHECK(r["error_allowance"].get<double>() > 0.0);
    CHECK(r["estimate"].get<double>() == Catch::Approx(1.0).margin(1e-9));
    CHECK(r["lower"].get<double>() <= r["estimate"].get<double>());
    CHECK(r["estimate"].get<double>() <= r["upper"].get<double>());
    CHECK(r["witness"].size() >= 2);
}

TEST_CASE("cli dist: sqdist exact and all-pairs ordering") {
    Sandbox box;
    REQUIRE(run_cli(box, "gen --kind uniform --n 5 --d 2 --seed 8 --out " + box.path("p.csv")) ==
            0);
    const std::string rj = box.path("r.json");
    REQUIRE(run_cli(box, "dist --input " + box.path("p.csv") +
                             " --algorithm sqdist --all-pairs --no-witness --out " + rj) == 0);
    const json doc = load_json(rj);
    CHECK(doc["parameters"]["mode"] == "exact");
    const json& rs = doc["results"];
    REQUIRE(rs.size() == 10);  // C(5,2)
    for (std::size_t k = 0; k + 1 < rs.size(); ++k) {
        const auto a = std::make_pair(rs[k]["i"].get<std::size_t>(),
                                      rs[k]["j"].get<std::size_t>());
        const auto b = std::make_pair(rs[k + 1]["i"].get<std::size_t>(),
                                      rs[k + 1]["j"].get<std::size_t>());
        CHECK(a < b);  // ordering by (i, j)
    }
    for (const json& r : rs) {
        CHECK(r["lower"].get<double>() <= r["estimate"].get<double>());
        CHECK(r["estimate"].get<double>() <= r["upper"].get<double>());
        CHECK_FALSE(r.contains("witness"));
    }

    SECTION("two-site exact squared distance is 4") {
        std::ofstream(box.path("two.csv")) << "0,0\n2,0\n";
        REQUIRE(run_cli(box, "dist --input " + box.path("two.csv") +
                                 " --algorithm sqdist --pairs 0:1 --out " + rj) == 0);
        const json doc2 = load_json(rj);
        const json& r = doc2["results"][0];
        CHECK(r["estimate"].get<double>() == 4.0);
        CHECK(r["lower"].get<double>() == 4.0);
        CHECK(r["upper"].get<double>() == 4.0);
    }
}

TEST_CASE("cli dist: usage and failure exit codes") {
    Sandbox box;
    std::ofstream(box.path("two.csv")) << "0,0\n2,0\n";
    std::string out;

    SECTION("missing pair selection") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv"), &out) == 1);
        CHECK(out.find("--pairs") != std::string::npos);
    }
    SECTION("unknown algorithm") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv") +
                               " --algorithm magic --all-pairs", &out) == 1);
    }
    SECTION("degenerate pair") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv") + " --pairs 0:0", &out) == 1);
    }
    SECTION("pair index out of range") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv") + " --pairs 0:7", &out) == 1);
    }
    SECTION("missing input file") {
        CHECK(run_cli(box, "dist --input " + box.path("nope.csv") + " --all-pairs", &out) == 1);
        CHECK(out.find("cannot open") != std::string::npos);
    }
    SECTION("unknown flag") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv") + " --wut", &out) == 1);
    }
    SECTION("ptas without delta or epsilon") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv") +
                               " --algorithm ptas --all-pairs", &out) == 1);
    }
    SECTION("ptas disconnection reports a validation failure") {
        CHECK(run_cli(box, "dist --input " + box.path("two.csv") +
                               " --algorithm ptas --delta 0.2 --c2 1e-12 --all-pairs", &out) == 2);
        CHECK(out.find("disconnected") != std::string::npos);
    }
}

TEST_CASE("cli validate: quick level passes on a clean instance") {
    Sandbox box;
    REQUIRE(run_cli(box, "gen --kind uniform --n 10 --d 2 --seed 3 --out " + box.path("p.csv")) ==
            0);
    std::string out;
    CHECK(run_cli(box, "validate --input " + box.path("p.csv") + " --seed 3 --level quick",
                  &out) == 0);
    CHECK(out.find("[ok]   sandwich-bounds") != std::string::npos);
    CHECK(out.find("[ok]   delta-sample") != std::string::npos);
    CHECK(out.find("[ok]   spanner-stretch") != std::string::npos);
    CHECK(out.find("[ok]   single-site-agreement") != std::string::npos);
    CHECK(out.find("[ok]   graph-soundness") != std::string::npos);
    CHECK(out.find("all checks passed") != std::string::npos);
    CHECK(out.find("[FAIL]") == std::string::npos);

    SECTION("bad level is a usage error") {
        CHECK(run_cli(box, "validate --input " + box.path("p.csv") + " --level turbo", &out) == 1);
    }
}

TEST_CASE("cli validate: full level includes the delta-convergence trend") {
    Sandbox box;
    std::ofstream(box.path("tri.csv")) << "0,0\n2,0\n1,1.6\n";
    std::string out;
    CHECK(run_cli(box, "validate --input " + box.path("tri.csv") + " --level full", &out) == 0);
    CHECK(out.find("delta-convergence") != std::string::npos);
    CHECK(out.find("all checks passed") != std::string::npos);
}

TEST_CASE("cli validate: tampered graph file fails with exit 2") {
    Sandbox box;
    std::ofstream(box.path("tri.csv")) << "0,0\n2,0\n1,1.6\n";
    const std::string gpath = box.path("g.nng");
    REQUIRE(run_cli(box, "dist --input " + box.path("tri.csv") +
                             " --algorithm ptas --delta 0.2 --pairs 0:1 --no-witness --graph-out " +
                             gpath + " --out " + box.path("r.json")) == 0);

    std::string clean_out;
    REQUIRE(run_cli(box, "validate --input " + box.path("tri.csv") + " --graph " + gpath,
                    &clean_out) == 0);
    REQUIRE(clean_out.find("[ok]   graph-soundness") != std::string::npos);

    // Perturb the weight of the last edge line in the file.
    std::vector<std::string> lines;
    {
        std::ifstream in(gpath);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    REQUIRE(lines.size() > 12);
    {
        std::stringstream ss(lines.back());
        std::uint64_t u, v;
        std::string wtok;
        int tag;
        REQUIRE((ss >> u >> v >> wtok >> tag));
        const double w = std::strtod(wtok.c_str(), nullptr);
        std::ostringstream edited;
        edited << u << ' ' << v << ' ' << std::hexfloat << (w * 2.0) << ' ' << tag;
        lines.back() = edited.str();
        std::ofstream out(gpath);
        for (const std::string& l : lines) out << l << '\n';
    }

    std::string tampered_out;
    CHECK(run_cli(box, "validate --input " + box.path("tri.csv") + " --graph " + gpath,
                  &tampered_out) == 2);
    CHECK(tampered_out.find("[FAIL] graph-soundness") != std::string::npos);
    CHECK(tampered_out.find("mismatch") != std::string::npos);
}

TEST_CASE("cli export-path: renders the witness polyline deterministically") {
    Sandbox box;
    REQUIRE(run_cli(box, "gen --kind collinear --n 3 --d 2 --seed 0 --out " + box.path("p.csv")) ==
            0);
    const std::string rj = box.path("r.json");
    REQUIRE(run_cli(box, "dist --input " + box.path("p.csv") +
                             " --algorithm ptas --delta 0.15 --pairs 0:2 --out " + rj) == 0);
    const json rdoc = load_json(rj);
    const std::size_t vertices = rdoc["results"][0]["witness"].size();
    REQUIRE(vertices >= 2);

    const std::string svg1 = box.path("a.svg");
    const std::string svg2 = box.path("b.svg");
    REQUIRE(run_cli(box, "export-path --result " + rj + " --input " + box.path("p.csv") +
                             " --out " + svg1) == 0);
    REQUIRE(run_cli(box, "export-path --result " + rj + " --input " + box.path("p.csv") +
                             " --out " + svg2) == 0);
    const std::string svg = slurp(svg1);
    CHECK(svg == slurp(svg2));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("viewBox=\"0 0 640") != std::string::npos);
    // One line element per witness segment, plus site markers.
    CHECK(count_substr(svg, "<line") == vertices - 1);
    CHECK(count_substr(svg, "<circle") >= 3);

    SECTION("steiner overlay from the graph file") {
        const std::string gpath = box.path("g.nng");
        REQUIRE(run_cli(box, "dist --input " + box.path("p.csv") +
                                 " --algorithm ptas --delta 0.15 --pairs 0:2 --graph-out " +
                                 gpath + " --out " + box.path("r2.json")) == 0);
        std::string out;
        REQUIRE(run_cli(box, "export-path --result " + rj + " --input " + box.path("p.csv") +
                                 " --graph " + gpath + " --out " + box.path("c.svg"),
                        &out) == 0);
        CHECK(out.find("steiner points") != std::string::npos);
        CHECK(count_substr(slurp(box.path("c.svg")), "<circle") > 100);
    }
}

TEST_CASE("cli export-path: curved geodesic renders at least `segments` lines") {
    Sandbox box;
    // A strictly curved single-site geodesic (wedge angle < pi/2), sampled at
    // 64 segments, wrapped in a results document by hand.
    const nnm::Vec p{0.0, 0.0};
    const nnm::Vec x{1.0, 0.0};
    const nnm::Vec y{std::cos(1.0), std::sin(1.0)};
    const std::size_t segments = 64;
    const nnm::PolylinePath geo = nnm::single_site_geodesic_path(p, x, y, segments);
    REQUIRE(geo.num_vertices() >= segments + 1);

    json witness = json::array();
    for (std::size_t k = 0; k < geo.num_vertices(); ++k) {
        const nnm::Vec v = geo.vertex(k);
        witness.push_back({v[0], v[1]});
    }
    json doc;
    doc["schema"] = "nnmetric-v1";
    doc["results"] = json::array({{{"i", 0},
                                   {"j", 0},
                                   {"algorithm", "geodesic"},
                                   {"estimate", nnm::single_site_nn_distance(p, x, y)},
                                   {"witness", witness}}});
    std::ofstream(box.path("geo.json")) << doc.dump(2);
    std::ofstream(box.path("site.csv")) << "0,0\n";

    REQUIRE(run_cli(box, "export-path --result " + box.path("geo.json") + " --input " +
                             box.path("site.csv") + " --out " + box.path("geo.svg")) == 0);
    CHECK(count_substr(slurp(box.path("geo.svg")), "<line") >= segments);
}

TEST_CASE("cli export-path: usage errors") {
    Sandbox box;
    std::ofstream(box.path("p3.csv")) << "0,0,0\n1,0,0\n";
    std::ofstream(box.path("p2.csv")) << "0,0\n1,0\n";
    std::ofstream(box.path("bad.json")) << "{not json";
    std::ofstream(box.path("empty.json")) << "{\"schema\":\"nnmetric-v1\",\"results\":[]}";

    std::string out;
    SECTION("d != 2 is rejected") {
        CHECK(run_cli(box, "export-path --result " + box.path("empty.json") + " --input " +
                               box.path("p3.csv") + " --out " + box.path("x.svg"),
                      &out) == 1);
        CHECK(out.find("d=2") != std::string::npos);
    }
    SECTION("bad JSON is rejected") {
        CHECK(run_cli(box, "export-path --result " + box.path("bad.json") + " --input " +
                               box.path("p2.csv") + " --out " + box.path("x.svg"),
                      &out) == 1);
    }
    SECTION("index out of range") {
        CHECK(run_cli(box, "export-path --result " + box.path("empty.json") + " --input " +
                               box.path("p2.csv") + " --out " + box.path("x.svg"),
                      &out) == 1);
    }
}

TEST_CASE("cli: NNMETRIC_THREADS is honored") {
    Sandbox box;
    REQUIRE(run_cli(box, "gen --kind uniform --n 6 --d 2 --seed 2 --out " + box.path("p.csv")) ==
            0);
    const std::string base = "dist --input " + box.path("p.csv") +
                             " --algorithm sqdist --all-pairs --no-witness --out ";
    const std::string r1 = box.path("t1.json");
    const std::string r2 = box.path("t4.json");
    {
        const std::string cmd = "NNMETRIC_THREADS=1 " + kCli + " " + base + r1 + " > /dev/null 2>&1";
        REQUIRE(std::system(cmd.c_str()) == 0);
    }
    {
        const std::string cmd = "NNMETRIC_THREADS=4 " + kCli + " " + base + r2 + " > /dev/null 2>&1";
        REQUIRE(std::system(cmd.c_str()) == 0);
    }
    // Same estimates regardless of concurrency (runtime fields may differ).
    const json a = load_json(r1);
    const json b = load_json(r2);
    REQUIRE(a["results"].size() == b["results"].size());
    for (std::size_t k = 0; k < a["results"].size(); ++k) {
        CHECK(a["results"][k]["estimate"] == b["results"][k]["estimate"]);
        CHECK(a["results"][k]["i"] == b["results"][k]["i"]);
        CHECK(a["results"][k]["j"] == b["results"][k]["j"]);
    }
}
