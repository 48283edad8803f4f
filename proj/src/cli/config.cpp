#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "nonloc/cli.hpp"

namespace nonloc::cli {

void normalize(RunConfig& config) {
    if (config.scenario != "ghsz" && config.scenario != "hardy" && config.scenario != "bell" &&
        config.scenario != "custom")
        throw std::invalid_argument("unknown scenario '" + config.scenario + "'");
    if (config.scenario == "custom" && config.scenario_file.empty())
        throw std::invalid_argument("custom scenario requires scenario_file");
    if (config.scenario != "custom" && !config.scenario_file.empty())
        throw std::invalid_argument("scenario_file is only valid with scenario = custom");
    if (config.n_per_context == 0) throw std::invalid_argument("n must be at least 1");
    if (config.shards == 0) throw std::invalid_argument("shards must be at least 1");
    if (config.scenario == "bell") {
        if (!config.angles_deg) config.angles_deg = AngleTriple{0.0, 60.0, 120.0};
        for (double a : *config.angles_deg)
            if (!std::isfinite(a)) throw std::invalid_argument("angles must be finite");
    } else if (config.angles_deg) {
        throw std::invalid_argument("angles are only valid for the bell scenario");
    }
}

namespace {

std::string quoted(const std::string& s) {
    std::ostringstream os;
    os << std::quoted(s);
    return os.str();
}

std::string number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string serialize(const RunConfig& config) {
    std::ostringstream os;
    os << "scenario = " << quoted(config.scenario) << "\n";
    if (!config.scenario_file.empty()) os << "scenario_file = " << quoted(config.scenario_file) << "\n";
    os << "rule = " << quoted(std::string(to_string(config.rule))) << "\n";
    os << "n = " << config.n_per_context << "\n";
    os << "seed = " << config.seed << "\n";
    if (config.angles_deg) {
        const auto& a = *config.angles_deg;
        os << "angles = [" << number(a[0]) << ", " << number(a[1]) << ", " << number(a[2]) << "]\n";
    }
    if (!config.out.empty()) os << "out = " << quoted(config.out) << "\n";
    os << "format = " << quoted(config.format == Format::Json ? "json" : "table") << "\n";
    os << "shards = " << config.shards << "\n";
    return os.str();
}

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::string rule = std::string(to_string(config.rule));
    std::string format = "json";
    std::vector<double> angles;

    CLI::App app("config");
    app.allow_config_extras(false);
    app.add_option("--scenario", config.scenario);
    app.add_option("--scenario_file", config.scenario_file);
    app.add_option("--rule", rule);
    app.add_option("--n", config.n_per_context);
    app.add_option("--seed", config.seed);
    app.add_option("--angles", angles)->expected(3);
    app.add_option("--out", config.out);
    app.add_option("--format", format);
    app.add_option("--shards", config.shards);

    std::istringstream in(text);
    try {
        app.parse_from_stream(in);
    } catch (const CLI::Error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    config.rule = parse_rule(rule);
    if (format == "json") config.format = Format::Json;
    else if (format == "table") config.format = Format::Table;
    else throw std::invalid_argument("config: unknown format '" + format + "'");
    if (!angles.empty()) config.angles_deg = AngleTriple{angles[0], angles[1], angles[2]};
    return config;
}

}  // namespace nonloc::cli
