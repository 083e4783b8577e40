#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "currod/runner.hpp"

using namespace currod;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path dir = fs::temp_directory_path() / "currod_cli_tests";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* square_section_cfg = R"({
  "section": {"preset": "square", "edge_length": 0.04},
  "seed": 7
})";

} // namespace

TEST_CASE("section subcommand reports the square torsion constant") {
    const fs::path cfg = write_config("square.json", square_section_cfg);
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_section").string();
    REQUIRE(run_subcommand("section", opt) == 0);

    const std::string report = slurp(fs::path(opt.out_dir) / "section_report.txt");
    REQUIRE(report.find("torsional_rigidity: 0.140") != std::string::npos);
    REQUIRE(report.find("area: 1") != std::string::npos);
    REQUIRE(fs::exists(fs::path(opt.out_dir) / "section.csv"));
    REQUIRE(fs::exists(fs::path(opt.out_dir) / "manifest.txt"));
}

TEST_CASE("outputs are byte-identical across repeated runs") {
    const fs::path cfg = write_config("square2.json", square_section_cfg);
    RunOptions a, b;
    a.config_path = b.config_path = cfg.string();
    a.out_dir = (cfg.parent_path() / "rep_a").string();
    b.out_dir = (cfg.parent_path() / "rep_b").string();
    REQUIRE(run_subcommand("section", a) == 0);
    REQUIRE(run_subcommand("section", b) == 0);
    REQUIRE(slurp(fs::path(a.out_dir) / "section.csv") ==
            slurp(fs::path(b.out_dir) / "section.csv"));
    REQUIRE(slurp(fs::path(a.out_dir) / "section_report.txt") ==
            slurp(fs::path(b.out_dir) / "section_report.txt"));
}

TEST_CASE("invalid configs are rejected with the offending field") {
    const fs::path cfg = write_config("bad.json", R"({"material": {"mu": -1.0}})");
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_bad").string();
    REQUIRE_THROWS_WITH(run_subcommand("section", opt),
                        Catch::Matchers::ContainsSubstring("material"));

    const fs::path cfg2 = write_config("bad2.json", R"({"regime": {"alpha": 1.5}})");
    opt.config_path = cfg2.string();
    REQUIRE_THROWS_WITH(run_subcommand("section", opt),
                        Catch::Matchers::ContainsSubstring("regime.alpha"));

    const fs::path cfg3 = write_config("bad3.json", "{ not json");
    opt.config_path = cfg3.string();
    REQUIRE_THROWS_WITH(run_subcommand("section", opt),
                        Catch::Matchers::ContainsSubstring("parse"));
}

TEST_CASE("cell subcommand tabulates Q0 against the closed form") {
    const fs::path cfg = write_config("cell.json", R"({
      "section": {"preset": "disc", "edge_length": 0.12},
      "material": {"lambda": 1.0, "mu": 1.0}
    })");
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_cell").string();
    REQUIRE(run_subcommand("cell", opt) == 0);
    const std::string table = slurp(fs::path(opt.out_dir) / "cell_table.csv");
    REQUIRE(table.find("q0_fem") != std::string::npos);
    // every tabulated row matches the closed form within 2%
    std::istringstream in(table);
    std::string line;
    std::getline(in, line); // hash header
    std::getline(in, line); // column header
    int rows = 0;
    while (std::getline(in, line)) {
        const auto p1 = line.rfind(',');
        std::string rest = line.substr(0, p1);
        const auto p2 = rest.rfind(',');
        rest = rest.substr(0, p2);
        const auto p3 = rest.rfind(',');
        const double gap = std::stod(rest.substr(p3 + 1));
        REQUIRE(gap < 0.02);
        ++rows;
    }
    REQUIRE(rows == 81);
    REQUIRE(fs::exists(fs::path(opt.out_dir) / "cell_phi.csv"));
}

TEST_CASE("reduce subcommand writes a solution and a report") {
    const fs::path cfg = write_config("reduce.json", R"({
      "curve": {"preset": "line", "length": 1.0, "n_s": 24},
      "frame": {"mode": "rotation_minimizing"},
      "section": {"preset": "square", "edge_length": 0.1},
      "material": {"lambda": 1.0, "mu": 1.0},
      "regime": {"alpha": 4.0},
      "reduce": {
        "boundary": "clamped_both",
        "loads": {"f": [{"sin": [0, 0.5]}, {"cos": [0.2]}, {}]}
      }
    })");
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_reduce").string();
    REQUIRE(run_subcommand("reduce", opt) == 0);
    const std::string report = slurp(fs::path(opt.out_dir) / "reduce_report.txt");
    REQUIRE(report.find("energy:") != std::string::npos);
    REQUIRE(report.find("cg_iterations:") != std::string::npos);
    const std::string sol = slurp(fs::path(opt.out_dir) / "solution.csv");
    REQUIRE(sol.find("s,u,w,vx") != std::string::npos);
}

TEST_CASE("gamma subcommand emits the convergence record") {
    const fs::path cfg = write_config("gamma.json", R"({
      "curve": {"preset": "helix", "radius": 1.0, "pitch": 1.0, "turns": 1.5, "n_s": 40},
      "frame": {"mode": "frenet"},
      "section": {"preset": "disc", "edge_length": 0.2},
      "material": {"lambda": 1.0, "mu": 1.0, "density": "svk"},
      "regime": {"alpha": 4.0},
      "state": {
        "a": {"cos": [0, 0.3]}, "b": {"sin": [0, 0.2]},
        "w": {"cos": [0.1, 0.2]}, "u": {"sin": [0, 0.15]}
      },
      "gamma": {"h": [1e-2, 3e-3]},
      "seed": 11
    })");
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_gamma").string();
    opt.threads = 2;
    REQUIRE(run_subcommand("gamma", opt) == 0);
    const std::string report = slurp(fs::path(opt.out_dir) / "gamma_report.txt");
    REQUIRE(report.find("fitted_order:") != std::string::npos);
    REQUIRE(report.find("probe_gradient_fd_residual:") != std::string::npos);
    const std::string csv = slurp(fs::path(opt.out_dir) / "gamma.csv");
    REQUIRE(csv.find("h,scaled_energy,reference,ratio") != std::string::npos);
    // ratio of the finest row is close to 1
    const auto last_line = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    std::istringstream ls(last_line);
    std::string tok;
    std::getline(ls, tok, ',');
    std::getline(ls, tok, ',');
    std::getline(ls, tok, ',');
    std::getline(ls, tok, ',');
    REQUIRE(std::abs(std::stod(tok) - 1.0) < 0.05);
    REQUIRE(fs::exists(fs::path(opt.out_dir) / "gamma_long.csv"));
}

TEST_CASE("ring subcommand reports exact periodicity") {
    const fs::path cfg = write_config("ring.json", R"({
      "curve": {"preset": "circle", "radius": 1.0, "n_s": 48},
      "frame": {"mode": "frenet"},
      "section": {"preset": "disc", "edge_length": 0.2},
      "material": {"lambda": 1.0, "mu": 1.0, "density": "svk"},
      "state": {
        "a": {"cos": [0, 0, 0.25]}, "b": {"sin": [0, 0, 0, 0.2]},
        "w": {"cos": [0, 0, 0.3]}, "u": {"sin": [0, 0.1]}, "u_linear": 0.05
      },
      "gamma": {"h": [1e-2, 3e-3]}
    })");
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_ring").string();
    REQUIRE(run_subcommand("ring", opt) == 0);
    const std::string report = slurp(fs::path(opt.out_dir) / "ring_report.txt");
    const auto pos = report.find("periodicity_gap: ");
    REQUIRE(pos != std::string::npos);
    const double gap = std::stod(report.substr(pos + 17));
    REQUIRE(gap <= 1e-12);
}

TEST_CASE("quadrature self check flag is honored") {
    const fs::path cfg = write_config("gammaq.json", R"({
      "curve": {"preset": "helix", "radius": 1.0, "pitch": 1.0, "turns": 1.0, "n_s": 24},
      "section": {"preset": "disc", "edge_length": 0.25},
      "state": {"a": {"cos": [0, 0.3]}},
      "gamma": {"h": [1e-2]}
    })");
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_gammaq").string();
    opt.quadrature_check = true;
    REQUIRE(run_subcommand("gamma", opt) == 0);
    const std::string report = slurp(fs::path(opt.out_dir) / "gamma_report.txt");
    REQUIRE(report.find("quadrature_ok: yes") != std::string::npos);
}

TEST_CASE("unknown subcommands fail") {
    const fs::path cfg = write_config("any.json", square_section_cfg);
    RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (cfg.parent_path() / "out_unknown").string();
    REQUIRE_THROWS_AS(run_subcommand("frobnicate", opt), std::invalid_argument);
}
