#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netplan/netplan.hpp"

using namespace netplan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("netplan_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("scenario defaults from an empty stream") {
    std::istringstream in("");
    Scenario s = Scenario::parse(in);
    CHECK(s.nx == 300);
    CHECK(s.ny == 200);
    CHECK(s.domain.x_max == 6.0);
    CHECK(s.radio.volume == 692.3);
    CHECK(s.target_load == 0.9);
    CHECK(s.method == "cvt");
    CHECK(s.mapping_mode == "auto");
}

TEST_CASE("scenario parses every section") {
    std::istringstream in(
        "# full scenario\n"
        "[domain]\n"
        "x_min = 0\nx_max = 8\ny_min = 0\ny_max = 2\n"
        "[grid]\n"
        "nx = 80\nny = 20\n"
        "[density]\n"
        "kind = builtin\nname = x_plus_y\n"
        "[radio]\n"
        "volume = 100.5\nbandwidth_hz = 1e7\nrate_min_bps = 5e5\npathloss_exponent = 3.5\n"
        "d_min = 0.2\n"
        "[planner]\n"
        "lloyd_iterations = 50\nweight_step = -0.01\nweight_decay = 0.25\ndecay_period = 10\n"
        "cov_threshold = 0.02\nmax_outer_iterations = 500\nupdate_sites = false\n"
        "[power_opt]\n"
        "var_tol = 1e-5\nmax_outer = 100\np_min_ratio = 0.001\nsweep = jacobi\n"
        "[run]\n"
        "seed = 9\noutput_dir = /tmp/x\nmethod = mapping\nmapping_mode = marginal_x_first\n"
        "target_load = 0.8\nsites = 12\nmax_sites = 64\n");
    Scenario s = Scenario::parse(in);
    CHECK(s.domain.x_max == 8.0);
    CHECK(s.nx == 80);
    CHECK(s.density_name == "x_plus_y");
    CHECK(s.radio.bandwidth_hz == 1e7);
    CHECK(s.planner.weight_decay == 0.25);
    CHECK(s.planner.update_sites == false);
    CHECK(s.power.var_tol == 1e-5);
    CHECK(s.power.sweep == SweepMode::jacobi);
    CHECK(s.seed == 9);
    CHECK(s.method == "mapping");
    CHECK(s.sites == 12);
    CHECK(s.resolved_output_dir() == "/tmp/x");
}

TEST_CASE("scenario rejects malformed input with a line number") {
    const auto expect_fail = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            (void)Scenario::parse(in, "t");
            FAIL("expected validation_error");
        } catch (const validation_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_fail("[nosuch]\n", "unknown section");
    expect_fail("[grid]\nnz = 4\n", "unknown key");
    expect_fail("nx = 4\n", "outside any section");
    expect_fail("[grid]\nnx : 4\n", "expected key = value");
    expect_fail("[grid\nnx = 4\n", "malformed section");
    expect_fail("[grid]\nnx = abc\n", "bad number");
    expect_fail("[grid]\nnx = 4.5\n", "expected integer");
    expect_fail("[planner]\nupdate_sites = yes\n", "true/false");
    // line numbers are reported
    expect_fail("[grid]\n\nnx = oops\n", "t:3");
}

TEST_CASE("scenario validation catches bad semantic values") {
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return Scenario::parse(in);
    };
    CHECK_THROWS_AS(parse("[run]\nmethod = simulated_annealing\n"), validation_error);
    CHECK_THROWS_AS(parse("[run]\ntarget_load = 0\n"), validation_error);
    CHECK_THROWS_AS(parse("[run]\nmapping_mode = sideways\n"), validation_error);
    CHECK_THROWS_AS(parse("[power_opt]\nsweep = sor\n"), validation_error);
    CHECK_THROWS_AS(parse("[density]\nname = blob\n"), validation_error);
    CHECK_THROWS_AS(parse("[domain]\nx_max = -1\n"), validation_error);
    CHECK_THROWS_AS(parse("[radio]\npathloss_exponent = 1\n"), validation_error);
}

TEST_CASE("output directory resolution order") {
    Scenario s;
    unsetenv("NETPLAN_OUTPUT_DIR");
    CHECK(s.resolved_output_dir() == "netplan_out");
    setenv("NETPLAN_OUTPUT_DIR", "/tmp/env_dir", 1);
    CHECK(s.resolved_output_dir() == "/tmp/env_dir");
    s.output_dir = "explicit";
    CHECK(s.resolved_output_dir() == "explicit");
    unsetenv("NETPLAN_OUTPUT_DIR");
}

TEST_CASE("scenario file loading and missing files") {
    const fs::path dir = temp_dir("scenario");
    const fs::path file = dir / "s.cfg";
    std::ofstream(file) << "[grid]\nnx = 30\nny = 20\n";
    Scenario s = Scenario::load(file);
    CHECK(s.nx == 30);
    CHECK_THROWS_AS(Scenario::load(dir / "absent.cfg"), io_error);
}

TEST_CASE("raster density kind requires a path and round-trips through a file") {
    Scenario s;
    s.density_kind = "raster";
    CHECK_THROWS_AS(s.make_density(), validation_error);

    const fs::path dir = temp_dir("raster");
    RasterGrid grid(RectDomain(0.0, 2.0, 0.0, 1.0), 4, 2);
    std::vector<double> vals{1, 2, 3, 4, 5, 6, 7, 8};
    double total = 0;
    for (double v : vals) total += v;
    for (double& v : vals) v /= total;
    write_density_raster(dir / "d.raster", grid, vals);
    DensityField f = read_density_raster(dir / "d.raster");
    CHECK(f.is_raster());
    CHECK(f.domain().x_max == 2.0);
    // cell-center values survive the round trip
    CHECK(f.value(grid.center(0).x, grid.center(0).y) == Catch::Approx(vals[0]));
    CHECK(f.value(grid.center(7).x, grid.center(7).y) == Catch::Approx(vals[7]));

    s.density_path = (dir / "d.raster").string();
    CHECK(s.make_density().is_raster());
}

TEST_CASE("fmt_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 692.3, 1e-9, -2.5e17}) {
        CHECK(std::stod(fmt_double(v)) == v);
    }
}

TEST_CASE("site CSV round trip") {
    const fs::path dir = temp_dir("sites");
    std::vector<Point> sites{{0.25, 0.75}, {1.5, 0.125}};
    write_sites_csv(dir / "s.csv", sites);
    SiteList back = read_sites_csv(dir / "s.csv");
    REQUIRE(back.sites.size() == 2);
    CHECK(back.sites[1].x == 1.5);
    CHECK(back.weights[0] == 0.0);

    // topology CSV keeps weights
    RasterGrid grid(RectDomain(0.0, 2.0, 0.0, 1.0), 4, 2);
    Topology t = assign_power_voronoi(sites, {0.0, -0.125}, grid);
    write_topology_csv(dir / "t.csv", t);
    SiteList tb = read_sites_csv(dir / "t.csv");
    CHECK(tb.weights[1] == -0.125);

    std::ofstream(dir / "bad.csv") << "site_index,x,y,weight\n0,oops,1,0\n";
    CHECK_THROWS_AS(read_sites_csv(dir / "bad.csv"), validation_error);
    std::ofstream(dir / "empty.csv") << "site_index,x,y,weight\n";
    CHECK_THROWS_AS(read_sites_csv(dir / "empty.csv"), validation_error);
}

TEST_CASE("assignment grid serialization") {
    const fs::path dir = temp_dir("grid");
    RasterGrid grid(RectDomain(0.0, 2.0, 0.0, 1.0), 4, 2);
    Topology t = assign_power_voronoi({{0.5, 0.5}, {1.5, 0.5}}, {0.0, 0.0}, grid);
    write_assignment_grid(dir / "a.grid", t);
    const std::string text = slurp(dir / "a.grid");
    CHECK(text == "4 2\n0 0 1 1\n0 0 1 1\n");
}

TEST_CASE("open_output creates parent directories; open_input reports failures") {
    const fs::path dir = temp_dir("io");
    open_output(dir / "a" / "b" / "c.txt") << "x";
    CHECK(fs::exists(dir / "a" / "b" / "c.txt"));
    CHECK_THROWS_AS(open_input(dir / "missing.txt"), io_error);
}

TEST_CASE("SVG writers produce valid-looking documents") {
    const fs::path dir = temp_dir("svg");
    RasterGrid grid(RectDomain(0.0, 6.0, 0.0, 4.0), 30, 20);
    Topology t = assign_power_voronoi({{1.0, 2.0}, {5.0, 2.0}}, {0.0, 0.0}, grid);
    write_topology_svg(dir / "t.svg", t);
    const std::string topo = slurp(dir / "t.svg");
    CHECK(topo.find("<svg") != std::string::npos);
    CHECK(topo.find("circle") != std::string::npos);

    write_bars_svg(dir / "b.svg", "cell load", std::vector<double>{0.2, 0.9, 0.5}, 1.0);
    const std::string bars = slurp(dir / "b.svg");
    CHECK(bars.find("cell load") != std::string::npos);
    CHECK(bars.find("stroke-dasharray") != std::string::npos); // reference line

    write_power_map_svg(dir / "p.svg", t, std::vector<double>{1.0, 0.25});
    const std::string pm = slurp(dir / "p.svg");
    CHECK(pm.find(">0 dB<") != std::string::npos);
    CHECK(pm.find(">-16 dB<") != std::string::npos);
    CHECK_THROWS_AS(write_power_map_svg(dir / "x.svg", t, std::vector<double>{1.0}),
                    validation_error);
}

TEST_CASE("emit_report writes header-only tables for an empty bundle") {
    const fs::path dir = temp_dir("report_empty");
    std::vector<std::string> written = emit_report(Artifacts{}, dir);
    CHECK(slurp(dir / "topology.csv") == "site_index,x,y,weight\n");
    CHECK(slurp(dir / "shares.csv") == "cell_index,share,fraction\n");
    CHECK(slurp(dir / "loads.csv") == "cell_index,load\n");
    CHECK(slurp(dir / "powers.csv") == "cell_index,power\n");
    CHECK(slurp(dir / "convergence.csv") == "iteration,max_share,min_share,cov,delta\n");
    CHECK(written.size() == 5);
}

TEST_CASE("convergence CSV columns match the planner log schema") {
    const fs::path dir = temp_dir("conv");
    std::vector<ConvergenceRow> log{{1, 0.5, 0.25, 0.3, -0.036}, {2, 0.4, 0.3, 0.1, -0.036}};
    write_convergence_csv(dir / "c.csv", log);
    const std::string text = slurp(dir / "c.csv");
    CHECK(text.rfind("iteration,max_share,min_share,cov,delta\n", 0) == 0);
    CHECK(text.find("\n2,") != std::string::npos);
}

TEST_CASE("full pipeline on a small scenario is deterministic") {
    const fs::path d1 = temp_dir("pipe1");
    const fs::path d2 = temp_dir("pipe2");
    const std::string base =
        "[grid]\nnx = 60\nny = 40\n"
        "[density]\nname = x_plus_y\n"
        "[radio]\nvolume = 120\n"
        "[planner]\nlloyd_iterations = 40\nmax_outer_iterations = 200\n"
        "[run]\nseed = 5\nsites = 6\nmethod = cvt\n";
    const auto run = [&](const fs::path& dir) {
        std::istringstream in(base + "output_dir = " + dir.string() + "\n");
        Scenario s = Scenario::parse(in);
        return run_pipeline(s);
    };
    RunReport r1 = run(d1);
    RunReport r2 = run(d2);
    CHECK(r1.sites == 6);
    CHECK(r1.power_converged);
    for (const char* name :
         {"topology.csv", "shares.csv", "loads_uniform_power.csv", "power_allocation.csv",
          "loads_optimized.csv", "plan_convergence.csv", "lattice.csv", "density.raster"}) {
        INFO(name);
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    CHECK(r1.log == r2.log);
}

TEST_CASE("pipeline failure carries the stage and completed artifacts") {
    const fs::path dir = temp_dir("pipefail");
    // mapping of x*exp(-y) at full demand volume: uniform power overloads
    std::istringstream in(
        "[grid]\nnx = 60\nny = 40\n"
        "[density]\nname = x_exp_negy\n"
        "[radio]\nvolume = 5000\n"
        "[run]\nsites = 6\nmethod = mapping\noutput_dir = " +
        dir.string() + "\n");
    Scenario s = Scenario::parse(in);
    try {
        (void)run_pipeline(s);
        FAIL("expected pipeline_error");
    } catch (const pipeline_error& e) {
        CHECK(e.stage == "load");
        CHECK(!e.artifacts.empty());
        // earlier artifacts were still written
        CHECK(fs::exists(dir / "topology.csv"));
    }
}
