#ifndef NETPLAN_PIPELINE_HPP
#define NETPLAN_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netplan/demand.hpp"
#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"
#include "netplan/io.hpp"
#include "netplan/loadmodel.hpp"
#include "netplan/mapping.hpp"
#include "netplan/planner.hpp"
#include "netplan/powopt.hpp"
#include "netplan/scenario.hpp"
#include "netplan/svg.hpp"

namespace netplan {

// A stage failure; carries the stage name and whatever artifacts earlier
// stages already wrote.
struct pipeline_error : std::runtime_error {
    std::string stage;
    std::vector<std::string> artifacts;
    pipeline_error(std::string stage_name, std::vector<std::string> done, const std::string& what)
        : std::runtime_error("pipeline stage '" + stage_name + "' failed: " + what),
          stage(std::move(stage_name)), artifacts(std::move(done)) {}
};

struct RunReport {
    int sites = 0;
    int lattice_cols = 0, lattice_rows = 0;
    double canonical_load = 0.0;
    double share_cov = 0.0;
    bool planner_converged = true;
    double load_max_before = 0.0, load_min_before = 0.0;
    int outage_cells_before = 0;
    bool baseline_diverged = false;
    double alpha_bar_after = 0.0;
    double load_var_after = 0.0;
    bool power_converged = false;
    std::vector<std::string> artifacts;
    std::string log; // human-readable run log
};

// Result bundle for emission; any subset may be present.
struct Artifacts {
    std::optional<Topology> topology;
    std::optional<DemandShare> shares;
    std::optional<std::vector<double>> loads;
    std::optional<std::vector<double>> powers;
    std::vector<ConvergenceRow> convergence;
};

// Writes the CSV tables (header-only when a table is absent), the convergence
// log, and SVG renderings for whatever the bundle carries. Returns the paths
// written.
inline std::vector<std::string> emit_report(const Artifacts& artifacts,
                                            const std::filesystem::path& dir) {
    std::vector<std::string> written;
    const auto record = [&](const std::filesystem::path& p) { written.push_back(p.string()); };

    if (artifacts.topology) {
        write_topology_csv(dir / "topology.csv", *artifacts.topology);
        write_assignment_grid(dir / "assignment.grid", *artifacts.topology);
        write_topology_svg(dir / "topology.svg", *artifacts.topology);
        record(dir / "assignment.grid");
        record(dir / "topology.svg");
    } else {
        open_output(dir / "topology.csv") << "site_index,x,y,weight\n";
    }
    record(dir / "topology.csv");

    if (artifacts.shares) {
        write_shares_csv(dir / "shares.csv", *artifacts.shares);
        write_bars_svg(dir / "shares.svg", "service demand share", artifacts.shares->per_cell);
        record(dir / "shares.svg");
    } else {
        open_output(dir / "shares.csv") << "cell_index,share,fraction\n";
    }
    record(dir / "shares.csv");

    if (artifacts.loads) {
        write_vector_csv(dir / "loads.csv", "load", *artifacts.loads);
        write_bars_svg(dir / "loads.svg", "cell load", *artifacts.loads, 1.0);
        record(dir / "loads.svg");
    } else {
        open_output(dir / "loads.csv") << "cell_index,load\n";
    }
    record(dir / "loads.csv");

    if (artifacts.powers) {
        write_vector_csv(dir / "powers.csv", "power", *artifacts.powers);
        if (artifacts.topology) {
            write_power_map_svg(dir / "power_map.svg", *artifacts.topology, *artifacts.powers);
            record(dir / "power_map.svg");
        }
    } else {
        open_output(dir / "powers.csv") << "cell_index,power\n";
    }
    record(dir / "powers.csv");

    write_convergence_csv(dir / "convergence.csv", artifacts.convergence);
    record(dir / "convergence.csv");
    return written;
}

inline MappingMode resolve_mapping_mode(const Scenario& sc, const DensityField& density) {
    if (sc.mapping_mode != "auto") return mapping_mode_from_name(sc.mapping_mode);
    return is_separable(density) ? MappingMode::separable : MappingMode::marginal_x_first;
}

// Full pipeline: dimensioning on the torus, lattice in the canonical
// rectangle, site placement by inverse mapping or by the Voronoi planner,
// load-coupled evaluation at uniform power, then variance-minimizing power
// optimization. Every stage's output is written before the next stage runs.
inline RunReport run_pipeline(const Scenario& scenario) {
    namespace fs = std::filesystem;
    const fs::path out_dir = scenario.resolved_output_dir();
    RunReport report;
    const auto logln = [&](const std::string& s) { report.log += s + '\n'; };
    const auto record = [&](const fs::path& p) { report.artifacts.push_back(p.string()); };

    std::string stage = "setup";
    try {
        const RasterGrid grid = scenario.make_grid();
        const DensityField density = scenario.make_density();
        const std::vector<double> delta = density.discretize(grid);
        RadioParams radio = scenario.radio;
        if (radio.d_min <= 0.0) radio.d_min = default_d_min(grid);
        write_density_raster(out_dir / "density.raster", grid, delta);
        record(out_dir / "density.raster");

        // Step 2: dimensioning in the canonical domain
        stage = "dimension";
        int L = scenario.sites;
        if (L > 0) {
            const auto [cols, rows] = lattice_shape(grid.domain, L);
            report.lattice_cols = cols;
            report.lattice_rows = rows;
            logln("dimension: using configured L=" + std::to_string(L));
        } else {
            DimensionResult dim = dimension(grid, radio, scenario.target_load, scenario.max_sites);
            L = dim.sites;
            report.lattice_cols = dim.lattice_cols;
            report.lattice_rows = dim.lattice_rows;
            report.canonical_load = dim.load;
            logln("dimension: L=" + std::to_string(L) + " (" + std::to_string(dim.lattice_cols) +
                  "x" + std::to_string(dim.lattice_rows) + "), uniform torus load " +
                  fmt_double(dim.load) + " (target " + fmt_double(scenario.target_load) +
                  ", design reference 0.91)");
        }
        report.sites = L;
        std::vector<Point> lattice =
            rectangular_lattice(grid.domain, report.lattice_cols, report.lattice_rows);
        write_sites_csv(out_dir / "lattice.csv", lattice);
        record(out_dir / "lattice.csv");

        // Step 3: site positioning
        stage = "placement";
        std::optional<Topology> topo;
        if (scenario.method == "mapping") {
            MappingSpec spec(grid.domain, density, resolve_mapping_mode(scenario, density));
            std::vector<Point> mapped = spec.map_topology(lattice);
            write_sites_csv(out_dir / "mapped_sites.csv", mapped);
            record(out_dir / "mapped_sites.csv");
            topo = assign_power_voronoi(std::move(mapped), std::vector<double>(L, 0.0), grid);
        } else {
            PlannerParams params = scenario.planner;
            params.rng_seed = scenario.seed;
            PlanResult planned =
                plan(random_sites(grid.domain, L, scenario.seed), delta, grid, params,
                     scenario.radio.volume);
            write_convergence_csv(out_dir / "plan_convergence.csv", planned.log);
            record(out_dir / "plan_convergence.csv");
            report.planner_converged = planned.converged;
            if (!planned.converged)
                logln("plan: did not reach the share-CoV threshold; best CoV " +
                      fmt_double(planned.final_cov));
            topo = std::move(planned.topology);
        }
        write_topology_csv(out_dir / "topology.csv", *topo);
        write_assignment_grid(out_dir / "assignment.grid", *topo);
        write_topology_svg(out_dir / "topology.svg", *topo);
        record(out_dir / "topology.csv");
        record(out_dir / "assignment.grid");
        record(out_dir / "topology.svg");

        DemandShare share = demand_share(*topo, delta, scenario.radio.volume);
        report.share_cov = cov(share.per_cell);
        write_shares_csv(out_dir / "shares.csv", share);
        write_bars_svg(out_dir / "shares.svg", "service demand share", share.per_cell);
        record(out_dir / "shares.csv");
        record(out_dir / "shares.svg");
        logln("placement: CoV(share) = " + fmt_double(report.share_cov));

        // Load evaluation at uniform power
        stage = "load";
        GainMatrix G = GainMatrix::build(topo->sites, grid, radio.pathloss_exponent, radio.d_min,
                                         Metric::euclidean);
        const std::vector<double> uniform_p(L, 1.0);
        std::vector<double> loads_before;
        try {
            NlceResult base = solve_nlce(*topo, delta, uniform_p, radio, G);
            loads_before = std::move(base.alpha);
        } catch (const convergence_error& e) {
            report.baseline_diverged = true;
            logln(std::string("load: uniform-power loads diverged (outage): ") + e.what());
            throw pipeline_error(stage, report.artifacts, e.what());
        }
        report.load_max_before = *std::max_element(loads_before.begin(), loads_before.end());
        report.load_min_before = *std::min_element(loads_before.begin(), loads_before.end());
        for (double a : loads_before)
            if (a > 1.0) ++report.outage_cells_before;
        write_vector_csv(out_dir / "loads_uniform_power.csv", "load", loads_before);
        write_bars_svg(out_dir / "loads_uniform_power.svg", "cell load (uniform power)",
                       loads_before, 1.0);
        record(out_dir / "loads_uniform_power.csv");
        record(out_dir / "loads_uniform_power.svg");
        logln("load: uniform power, max " + fmt_double(report.load_max_before) + ", min " +
              fmt_double(report.load_min_before) + ", outage cells " +
              std::to_string(report.outage_cells_before));

        // Step 4: power optimization
        stage = "optimize";
        PowerOptOptions opts = scenario.power;
        opts.sweep = sweep_mode_from_name(scenario.power_sweep);
        PowerOptResult opt = optimize_power(*topo, delta, radio, G, opts);
        report.alpha_bar_after = opt.alpha_bar;
        report.load_var_after = opt.residual_var;
        report.power_converged = opt.converged;
        write_vector_csv(out_dir / "power_allocation.csv", "power", opt.p_star);
        write_vector_csv(out_dir / "loads_optimized.csv", "load", opt.loads);
        write_bars_svg(out_dir / "loads_optimized.svg", "cell load (optimized power)", opt.loads,
                       1.0);
        write_power_map_svg(out_dir / "power_map.svg", *topo, opt.p_star);
        record(out_dir / "power_allocation.csv");
        record(out_dir / "loads_optimized.csv");
        record(out_dir / "loads_optimized.svg");
        record(out_dir / "power_map.svg");
        logln("optimize: uniform load " + fmt_double(opt.alpha_bar) + ", Var(load) " +
              fmt_double(opt.residual_var) + (opt.converged ? "" : " (not converged)"));

        stage = "report";
        auto out = open_output(out_dir / "report.txt");
        out << report.log;
        record(out_dir / "report.txt");
        return report;
    } catch (const pipeline_error&) {
        throw;
    } catch (const std::exception& e) {
        throw pipeline_error(stage, report.artifacts, e.what());
    }
}

} // namespace netplan

#endif
