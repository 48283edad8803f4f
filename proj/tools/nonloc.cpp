// nonloc: simulate specimen populations for the GHSZ, Hardy and Bell schemes and
// check the EQC / sEQC correlation extensions against them.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nonloc/cli.hpp"

namespace {

using nonloc::cli::AngleTriple;
using nonloc::cli::RunConfig;

struct Flags {
    std::string config_path;
    std::string scenario;
    std::string scenario_file;
    std::string rule;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<double> angles;
    std::string out;
    std::string format;
    std::size_t shards = 0;
};

void add_run_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config_path, "TOML-style run configuration")->check(CLI::ExistingFile);
    cmd.add_option("--scenario", f.scenario, "ghsz | hardy | bell | custom");
    cmd.add_option("--scenario-file", f.scenario_file, "JSON scenario for --scenario custom");
    cmd.add_option("--rule", f.rule, "measured | seqc | eqc");
    cmd.add_option("--n", f.n, "specimens per context");
    cmd.add_option("--seed", f.seed, "64-bit seed (falls back to NONLOC_SEED)");
    cmd.add_option("--angles", f.angles, "Bell angles in degrees, a,b,c")->delimiter(',')->expected(3);
    cmd.add_option("--out", f.out, "output path (default stdout)");
    cmd.add_option("--format", f.format, "json | table");
    cmd.add_option("--shards", f.shards, "worker shards");
}

RunConfig resolve(const CLI::App& cmd, const Flags& f) {
    RunConfig config;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        std::stringstream text;
        text << in.rdbuf();
        config = nonloc::cli::parse_config(text.str());
    } else if (const char* env = std::getenv("NONLOC_SEED")) {
        config.seed = std::stoull(env);
    }
    if (cmd.count("--scenario")) config.scenario = f.scenario;
    if (cmd.count("--scenario-file")) config.scenario_file = f.scenario_file;
    if (cmd.count("--rule")) config.rule = nonloc::parse_rule(f.rule);
    if (cmd.count("--n")) config.n_per_context = f.n;
    if (cmd.count("--seed")) config.seed = f.seed;
    if (cmd.count("--angles")) config.angles_deg = AngleTriple{f.angles[0], f.angles[1], f.angles[2]};
    if (cmd.count("--out")) config.out = f.out;
    if (cmd.count("--format")) {
        if (f.format == "json") config.format = nonloc::cli::Format::Json;
        else if (f.format == "table") config.format = nonloc::cli::Format::Table;
        else throw std::invalid_argument("unknown format '" + f.format + "'");
    }
    if (cmd.count("--shards")) config.shards = f.shards;
    return config;
}

std::vector<AngleTriple> parse_grid(const std::string& text) {
    std::vector<AngleTriple> grid;
    std::stringstream points(text);
    std::string point;
    while (std::getline(points, point, ';')) {
        if (point.find_first_not_of(" \t") == std::string::npos) continue;
        std::stringstream parts(point);
        std::string part;
        std::vector<double> v;
        while (std::getline(parts, part, ',')) v.push_back(std::stod(part));
        if (v.size() != 3) throw std::invalid_argument("grid point '" + point + "' needs three angles");
        grid.push_back({v[0], v[1], v[2]});
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Specimen-population simulator for EQC / sEQC nonlocality schemes");
    app.set_version_flag("--version", nonloc::cli::kToolVersion);
    app.require_subcommand(1);

    Flags run_flags;
    auto* run = app.add_subcommand("run", "run one scenario and write a report");
    add_run_flags(*run, run_flags);

    Flags sweep_flags;
    std::string grid_text;
    auto* sweep = app.add_subcommand("sweep", "evaluate the Bell inequality over an angle grid");
    add_run_flags(*sweep, sweep_flags);
    sweep->add_option("--grid", grid_text, "angle triples in degrees: 'a,b,c;a,b,c;...'");

    nonloc::cli::VerifyOptions verify_opts;
    auto* verify = app.add_subcommand("verify", "run the invariant and property suites");
    verify->add_option("--tolerance", verify_opts.tol, "algebraic tolerance");
    verify->add_option("--seed", verify_opts.seed, "seed for randomised suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return nonloc::cli::cmd_run(resolve(*run, run_flags), std::cout, std::cerr);
        if (*sweep) {
            RunConfig base = resolve(*sweep, sweep_flags);
            if (!sweep->count("--scenario")) base.scenario = "bell";
            std::vector<AngleTriple> grid;
            if (sweep->count("--grid")) {
                grid = parse_grid(grid_text);
            } else {
                for (double t = 0.0; t <= 90.0; t += 15.0) grid.push_back({0.0, t, 2.0 * t});
            }
            return nonloc::cli::cmd_sweep(base, grid, std::cout, std::cerr);
        }
        if (*verify) return nonloc::cli::cmd_verify(verify_opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
