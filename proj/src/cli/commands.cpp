#include <ostream>
#include <stdexcept>

#include "nonloc/cli.hpp"
#include "nonloc/scenario.hpp"

namespace nonloc::cli {

using nlohmann::json;

namespace {

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.out.empty()) out << text;
    else write_atomically(config.out, text);
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    int code = 1;
    json report;
    try {
        report = build_report(config, code);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        emit(config, render(report, config.format), out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    if (code == 2) err << "precondition failed: " << report.value("error", std::string()) << "\n";
    return code;
}

json sweep(const RunConfig& input, const std::vector<AngleTriple>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty angle grid");
    RunConfig base = input;
    if (base.scenario != "bell") throw std::invalid_argument("sweep requires the bell scenario");
    normalize(base);

    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["tool_version"] = kToolVersion;
    doc["config"] = {{"n_per_context", base.n_per_context}, {"seed", base.seed}};
    json rows = json::array();
    for (const auto& deg : grid) {
        const std::array<double, 3> rad = {degrees_to_radians(deg[0]), degrees_to_radians(deg[1]),
                                           degrees_to_radians(deg[2])};
        json row = {{"angles_deg", deg}, {"source", "quantum-expectations"}};
        std::optional<ScenarioRun> run;
        try {
            run.emplace(build_bell(rad, base.n_per_context));
        } catch (const PreconditionError& e) {
            row["error"] = e.what();
            rows.push_back(row);
            continue;
        }
        const Scenario& s = run->scenario;
        const Population pop = measure_all(run->population, base.seed, base.shards);
        const auto q = bell_inequality(s, pop, SpecimenSet(pop.size()), BellSource::QuantumExpectations);
        row["lhs"] = q.lhs;
        row["rhs"] = q.rhs;
        row["holds"] = q.holds;
        row["lhs_minus_rhs"] = q.lhs - q.rhs;
        rows.push_back(row);

        SpecimenSet x(pop.size());
        x.set();
        for (const auto& c : s.correlations) x &= domain(c, ExtensionRule::Seqc, pop);
        if (x.none()) continue;
        const auto m = bell_inequality(s, pop, x, BellSource::SampleMeans, ExtensionRule::Seqc);
        rows.push_back({{"angles_deg", deg},
                        {"source", "sample-means"},
                        {"lhs", m.lhs},
                        {"rhs", m.rhs},
                        {"holds", m.holds},
                        {"lhs_minus_rhs", m.lhs - m.rhs},
                        {"sample_size", m.sample.size()}});
    }
    doc["rows"] = rows;
    return doc;
}

int cmd_sweep(const RunConfig& base, const std::vector<AngleTriple>& grid, std::ostream& out, std::ostream& err) {
    try {
        emit(base, render(sweep(base, grid), base.format), out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace nonloc::cli
