// Command-line front end: scenario-driven planning, mapping, load evaluation
// and power optimization with CSV/SVG outputs.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "netplan/netplan.hpp"

namespace fs = std::filesystem;
using namespace netplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

struct Common {
    std::string scenario_path;
    std::string out_dir;
};

fs::path resolve_out(const Common& c, const Scenario& sc) {
    return c.out_dir.empty() ? fs::path(sc.resolved_output_dir()) : fs::path(c.out_dir);
}

Topology topology_from_sites_file(const Scenario& sc, const std::string& path) {
    const RasterGrid grid = sc.make_grid();
    SiteList list = read_sites_csv(path);
    return assign_power_voronoi(std::move(list.sites), std::move(list.weights), grid);
}

int cmd_map(const Common& c, const std::string& sites_in) {
    Scenario sc = Scenario::load(c.scenario_path);
    const RasterGrid grid = sc.make_grid();
    const DensityField density = sc.make_density();
    std::vector<Point> sites;
    if (!sites_in.empty()) {
        sites = read_sites_csv(sites_in).sites;
    } else {
        int L = sc.sites;
        if (L <= 0) {
            RadioParams radio = sc.radio;
            if (radio.d_min <= 0.0) radio.d_min = default_d_min(grid);
            L = dimension(grid, radio, sc.target_load, sc.max_sites).sites;
        }
        const auto [cols, rows] = lattice_shape(grid.domain, L);
        sites = rectangular_lattice(grid.domain, cols, rows);
    }
    MappingSpec spec(grid.domain, density, resolve_mapping_mode(sc, density));
    std::vector<Point> mapped = spec.map_topology(sites);
    const fs::path out = resolve_out(c, sc) / "mapped_sites.csv";
    write_sites_csv(out, mapped);
    std::cout << "mapped " << mapped.size() << " sites -> " << out.string() << '\n';
    return kExitOk;
}

int cmd_plan(const Common& c) {
    Scenario sc = Scenario::load(c.scenario_path);
    const RasterGrid grid = sc.make_grid();
    const std::vector<double> delta = sc.make_density().discretize(grid);
    int L = sc.sites;
    if (L <= 0) {
        RadioParams radio = sc.radio;
        if (radio.d_min <= 0.0) radio.d_min = default_d_min(grid);
        L = dimension(grid, radio, sc.target_load, sc.max_sites).sites;
    }
    PlannerParams params = sc.planner;
    params.rng_seed = sc.seed;
    PlanResult result =
        plan(random_sites(grid.domain, L, sc.seed), delta, grid, params, sc.radio.volume);
    const fs::path dir = resolve_out(c, sc);
    Artifacts artifacts;
    artifacts.topology = result.topology;
    artifacts.shares = demand_share(result.topology, delta, sc.radio.volume);
    artifacts.convergence = result.log;
    emit_report(artifacts, dir);
    std::cout << "plan: L=" << L << ", iterations=" << result.iterations
              << ", CoV(share)=" << fmt_double(result.final_cov)
              << (result.converged ? "" : " (not converged)") << ", outputs in " << dir.string()
              << '\n';
    return result.converged ? kExitOk : kExitConvergence;
}

int cmd_dimension(const Common& c) {
    Scenario sc = Scenario::load(c.scenario_path);
    const RasterGrid grid = sc.make_grid();
    RadioParams radio = sc.radio;
    if (radio.d_min <= 0.0) radio.d_min = default_d_min(grid);
    DimensionResult r = dimension(grid, radio, sc.target_load, sc.max_sites);
    std::cout << "L=" << r.sites << " lattice=" << r.lattice_cols << "x" << r.lattice_rows
              << " load=" << fmt_double(r.load) << " (target " << fmt_double(sc.target_load)
              << ", design reference 0.91)\n";
    return kExitOk;
}

int cmd_load(const Common& c, const std::string& topology_path, const std::string& sir_map) {
    Scenario sc = Scenario::load(c.scenario_path);
    const RasterGrid grid = sc.make_grid();
    const std::vector<double> delta = sc.make_density().discretize(grid);
    Topology topo = topology_from_sites_file(sc, topology_path);
    RadioParams radio = sc.radio;
    if (radio.d_min <= 0.0) radio.d_min = default_d_min(grid);
    GainMatrix G =
        GainMatrix::build(topo.sites, grid, radio.pathloss_exponent, radio.d_min, Metric::euclidean);
    const std::vector<double> p(topo.num_sites(), 1.0);
    NlceResult r = solve_nlce(topo, delta, p, radio, G);
    const fs::path dir = resolve_out(c, sc);
    Artifacts artifacts;
    artifacts.topology = topo;
    artifacts.loads = r.alpha;
    emit_report(artifacts, dir);
    if (!sir_map.empty()) {
        std::vector<double> sir_values(grid.size());
        for (int a = 0; a < grid.size(); ++a) {
            const double v = sir(a, topo.assignment[a], r.alpha, p, G);
            sir_values[a] = std::min(v, kSirCap);
        }
        write_density_raster(dir / sir_map, grid, sir_values);
    }
    int outage = 0;
    for (double a : r.alpha)
        if (a > 1.0) ++outage;
    std::cout << "load: max=" << fmt_double(*std::max_element(r.alpha.begin(), r.alpha.end()))
              << " outage_cells=" << outage << ", outputs in " << dir.string() << '\n';
    return kExitOk;
}

int cmd_optimize(const Common& c, const std::string& topology_path) {
    Scenario sc = Scenario::load(c.scenario_path);
    const RasterGrid grid = sc.make_grid();
    const std::vector<double> delta = sc.make_density().discretize(grid);
    Topology topo = topology_from_sites_file(sc, topology_path);
    RadioParams radio = sc.radio;
    if (radio.d_min <= 0.0) radio.d_min = default_d_min(grid);
    GainMatrix G =
        GainMatrix::build(topo.sites, grid, radio.pathloss_exponent, radio.d_min, Metric::euclidean);
    PowerOptOptions opts = sc.power;
    opts.sweep = sweep_mode_from_name(sc.power_sweep);
    PowerOptResult r = optimize_power(topo, delta, radio, G, opts);
    const fs::path dir = resolve_out(c, sc);
    Artifacts artifacts;
    artifacts.topology = topo;
    artifacts.loads = r.loads;
    artifacts.powers = r.p_star;
    emit_report(artifacts, dir);
    std::cout << "optimize: alpha_bar=" << fmt_double(r.alpha_bar)
              << " Var=" << fmt_double(r.residual_var)
              << (r.converged ? "" : " (not converged)") << ", outputs in " << dir.string() << '\n';
    return r.converged ? kExitOk : kExitConvergence;
}

int cmd_pipeline(const Common& c) {
    Scenario sc = Scenario::load(c.scenario_path);
    if (!c.out_dir.empty()) sc.output_dir = c.out_dir;
    RunReport report = run_pipeline(sc);
    std::cout << report.log;
    std::cout << "artifacts in " << sc.resolved_output_dir() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cellular network planning: demand-compatible topologies, "
                 "load-coupled evaluation, and power optimization"};
    app.require_subcommand(1);

    Common common;
    std::string sites_in, topology_path, sir_map;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("-s,--scenario", common.scenario_path, "scenario file")->required();
        sub->add_option("-o,--out", common.out_dir, "output directory (overrides scenario)");
    };

    CLI::App* map_cmd = app.add_subcommand("map", "map a lattice through the inverse mapping");
    add_common(map_cmd);
    map_cmd->add_option("--sites-in", sites_in, "input site CSV (default: canonical lattice)");

    CLI::App* plan_cmd = app.add_subcommand("plan", "demand-uniform planning (Voronoi planner)");
    add_common(plan_cmd);

    CLI::App* dim_cmd = app.add_subcommand("dimension", "find the lattice size for a target load");
    add_common(dim_cmd);

    CLI::App* load_cmd = app.add_subcommand("load", "solve coupled cell loads for a topology");
    add_common(load_cmd);
    load_cmd->add_option("--topology", topology_path, "topology CSV")->required();
    load_cmd->add_option("--sir-map", sir_map, "also write a per-element SIR raster");

    CLI::App* opt_cmd = app.add_subcommand("optimize", "variance-minimizing power allocation");
    add_common(opt_cmd);
    opt_cmd->add_option("--topology", topology_path, "topology CSV")->required();

    CLI::App* pipe_cmd = app.add_subcommand("pipeline", "run the full planning pipeline");
    add_common(pipe_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (map_cmd->parsed()) return cmd_map(common, sites_in);
        if (plan_cmd->parsed()) return cmd_plan(common);
        if (dim_cmd->parsed()) return cmd_dimension(common);
        if (load_cmd->parsed()) return cmd_load(common, topology_path, sir_map);
        if (opt_cmd->parsed()) return cmd_optimize(common, topology_path);
        if (pipe_cmd->parsed()) return cmd_pipeline(common);
    } catch (const pipeline_error& e) {
        std::cerr << e.what() << '\n';
        for (const std::string& a : e.artifacts) std::cerr << "  completed: " << a << '\n';
        return kExitConvergence;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}
