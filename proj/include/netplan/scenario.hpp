#ifndef NETPLAN_SCENARIO_HPP
#define NETPLAN_SCENARIO_HPP

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "netplan/demand.hpp"
#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"
#include "netplan/io.hpp"
#include "netplan/loadmodel.hpp"
#include "netplan/planner.hpp"
#include "netplan/powopt.hpp"

namespace netplan {

// Full run configuration. Parsed from a sectioned key/value text file:
//
//   # comment
//   [section]
//   key = value
//
// Unknown sections or keys are rejected. See README for the grammar and
// the list of keys.
struct Scenario {
    RectDomain domain{0.0, 6.0, 0.0, 4.0};
    int nx = 300, ny = 200;

    std::string density_kind = "builtin"; // builtin | raster
    std::string density_name = "uniform"; // uniform | x_exp_negy | x_plus_y
    std::string density_path;

    RadioParams radio{692.3, 20e6, 1e6, 3.0, 0.0};
    PlannerParams planner;
    PowerOptOptions power;
    std::string power_sweep = "gauss_seidel";

    std::uint64_t seed = 1;
    std::string output_dir;
    std::string method = "cvt";         // cvt | mapping
    std::string mapping_mode = "auto";  // auto | separable | marginal_x_first | marginal_y_first
    double target_load = 0.9;
    int sites = 0;                      // 0: run dimensioning
    int max_sites = 200;

    RasterGrid make_grid() const { return RasterGrid(domain, nx, ny); }

    DensityField make_density() const {
        if (density_kind == "builtin")
            return DensityField::builtin(builtin_density_from_name(density_name), domain);
        if (density_kind == "raster") {
            if (density_path.empty())
                throw validation_error("scenario: raster density requires density.path");
            return read_density_raster(density_path);
        }
        throw validation_error("scenario: unknown density kind: " + density_kind);
    }

    std::string resolved_output_dir() const {
        if (!output_dir.empty()) return output_dir;
        if (const char* env = std::getenv("NETPLAN_OUTPUT_DIR")) return env;
        return "netplan_out";
    }

    void validate() {
        (void)make_grid();
        radio.validate();
        planner.rng_seed = seed;
        planner.validate(domain);
        power.sweep = sweep_mode_from_name(power_sweep);
        if (method != "cvt" && method != "mapping")
            throw validation_error("scenario: method must be cvt or mapping");
        if (mapping_mode != "auto") (void)mapping_mode_from_name(mapping_mode);
        if (density_kind == "builtin") (void)builtin_density_from_name(density_name);
        if (!(target_load > 0.0)) throw validation_error("scenario: target_load must be > 0");
        if (sites < 0 || max_sites < 1) throw validation_error("scenario: bad site counts");
        if (!(power.var_tol > 0.0) || power.max_outer < 1 ||
            !(power.p_min_ratio > 0.0 && power.p_min_ratio <= 1.0))
            throw validation_error("scenario: bad power_opt settings");
    }

    static Scenario load(const std::filesystem::path& path) {
        auto in = open_input(path);
        return parse(in, path.string());
    }

    static Scenario parse(std::istream& in, const std::string& origin = "<stream>") {
        static const std::map<std::string, std::set<std::string>> kKnown = {
            {"domain", {"x_min", "x_max", "y_min", "y_max"}},
            {"grid", {"nx", "ny"}},
            {"density", {"kind", "name", "path"}},
            {"radio", {"volume", "bandwidth_hz", "rate_min_bps", "pathloss_exponent", "d_min"}},
            {"planner",
             {"lloyd_iterations", "weight_step", "weight_decay", "decay_period", "cov_threshold",
              "max_outer_iterations", "update_sites"}},
            {"power_opt", {"var_tol", "max_outer", "p_min_ratio", "sweep"}},
            {"run",
             {"seed", "output_dir", "method", "mapping_mode", "target_load", "sites",
              "max_sites"}},
        };

        Scenario s;
        double x0 = s.domain.x_min, x1 = s.domain.x_max, y0 = s.domain.y_min, y1 = s.domain.y_max;
        std::string section;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto fail = [&](const std::string& msg) {
                throw validation_error("scenario " + origin + ":" + std::to_string(lineno) + ": " +
                                       msg);
            };
            std::string t = line;
            if (const auto hash = t.find('#'); hash != std::string::npos) t.resize(hash);
            const auto strip = [](std::string v) {
                const auto b = v.find_first_not_of(" \t\r");
                const auto e = v.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
            };
            t = strip(t);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']') fail("malformed section header");
                section = t.substr(1, t.size() - 2);
                if (!kKnown.count(section)) fail("unknown section [" + section + "]");
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) fail("expected key = value");
            const std::string key = strip(t.substr(0, eq));
            const std::string value = strip(t.substr(eq + 1));
            if (section.empty()) fail("key outside any section");
            if (!kKnown.at(section).count(key)) fail("unknown key " + section + "." + key);

            const auto num = [&]() {
                try {
                    std::size_t pos = 0;
                    const double v = std::stod(value, &pos);
                    if (pos != value.size()) throw std::invalid_argument("");
                    return v;
                } catch (const std::exception&) {
                    fail("bad number: " + value);
                    return 0.0;
                }
            };
            const auto integer = [&]() {
                const double v = num();
                if (v != static_cast<long long>(v)) fail("expected integer: " + value);
                return static_cast<int>(v);
            };
            const auto boolean = [&]() {
                if (value == "true") return true;
                if (value == "false") return false;
                fail("expected true/false: " + value);
                return false;
            };

            if (section == "domain") {
                if (key == "x_min") x0 = num();
                else if (key == "x_max") x1 = num();
                else if (key == "y_min") y0 = num();
                else y1 = num();
            } else if (section == "grid") {
                (key == "nx" ? s.nx : s.ny) = integer();
            } else if (section == "density") {
                if (key == "kind") s.density_kind = value;
                else if (key == "name") s.density_name = value;
                else s.density_path = value;
            } else if (section == "radio") {
                if (key == "volume") s.radio.volume = num();
                else if (key == "bandwidth_hz") s.radio.bandwidth_hz = num();
                else if (key == "rate_min_bps") s.radio.rate_min_bps = num();
                else if (key == "pathloss_exponent") s.radio.pathloss_exponent = num();
                else s.radio.d_min = num();
            } else if (section == "planner") {
                if (key == "lloyd_iterations") s.planner.lloyd_iterations = integer();
                else if (key == "weight_step") s.planner.weight_step = num();
                else if (key == "weight_decay") s.planner.weight_decay = num();
                else if (key == "decay_period") s.planner.decay_period = integer();
                else if (key == "cov_threshold") s.planner.cov_threshold = num();
                else if (key == "max_outer_iterations") s.planner.max_outer_iterations = integer();
                else s.planner.update_sites = boolean();
            } else if (section == "power_opt") {
                if (key == "var_tol") s.power.var_tol = num();
                else if (key == "max_outer") s.power.max_outer = integer();
                else if (key == "p_min_ratio") s.power.p_min_ratio = num();
                else s.power_sweep = value;
            } else { // run
                if (key == "seed") s.seed = static_cast<std::uint64_t>(num());
                else if (key == "output_dir") s.output_dir = value;
                else if (key == "method") s.method = value;
                else if (key == "mapping_mode") s.mapping_mode = value;
                else if (key == "target_load") s.target_load = num();
                else if (key == "sites") s.sites = integer();
                else s.max_sites = integer();
            }
        }
        s.domain = RectDomain(x0, x1, y0, y1);
        s.validate();
        return s;
    }
};

} // namespace netplan

#endif
