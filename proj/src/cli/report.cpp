#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nonloc/cli.hpp"
#include "nonloc/scenario.hpp"

namespace nonloc::cli {

using nlohmann::json;

namespace {

ScenarioRun make_run(const RunConfig& config) {
    if (config.scenario == "ghsz") return build_ghsz(config.n_per_context);
    if (config.scenario == "hardy") return build_hardy(config.n_per_context);
    if (config.scenario == "bell") {
        const auto& a = *config.angles_deg;
        return build_bell({degrees_to_radians(a[0]), degrees_to_radians(a[1]), degrees_to_radians(a[2])},
                          config.n_per_context);
    }
    std::ifstream in(config.scenario_file);
    if (!in) throw std::runtime_error("cannot read scenario file '" + config.scenario_file + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("scenario file '" + config.scenario_file + "': " + e.what());
    }
    try {
        return load_scenario(doc, config.n_per_context);
    } catch (const json::exception& e) {
        throw std::invalid_argument("scenario file '" + config.scenario_file + "': " + e.what());
    }
}

json config_echo(const RunConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    if (!c.scenario_file.empty()) j["scenario_file"] = c.scenario_file;
    j["rule"] = std::string(to_string(c.rule));
    j["n_per_context"] = c.n_per_context;
    j["seed"] = c.seed;
    if (c.angles_deg) j["angles_deg"] = *c.angles_deg;
    return j;
}

json checks_json(const std::vector<CheckRecord>& checks) {
    json arr = json::array();
    for (const auto& c : checks) {
        json row = {{"label", c.label}, {"holds", c.holds}};
        if (c.value) row["value"] = *c.value;
        arr.push_back(row);
    }
    return arr;
}

json probability_json(const Scenario& s, const Population& pop) {
    json arr = json::array();
    for (const auto& pa : s.probabilities) {
        std::vector<Event> events;
        for (const auto& [obs, outcome] : pa.events) events.push_back({&s.observables[obs].projection, outcome});
        const double born = joint_probability(s.psi, events);
        SpecimenSet where(pop.size());
        where.set();
        SpecimenSet hit = where;
        for (const auto& [obs, outcome] : pa.events) {
            where &= set_query(pop, obs, SetKind::Measured);
            hit &= set_query(pop, obs, outcome == 1 ? SetKind::Measured1 : SetKind::Measured0);
        }
        const auto n = where.count();
        json row = {{"label", pa.label}, {"born", born}, {"measured", n}, {"observed", hit.count()}};
        if (n > 0) {
            row["frequency"] = static_cast<double>(hit.count()) / static_cast<double>(n);
            row["sigma"] = std::sqrt(born * (1.0 - born) / static_cast<double>(n));
        }
        arr.push_back(row);
    }
    return arr;
}

json bell_eval_json(const BellEvaluation& ev) {
    json j = {{"lhs", ev.lhs}, {"rhs", ev.rhs}, {"holds", ev.holds},
              {"source", ev.source == BellSource::SampleMeans ? "sample-means" : "quantum-expectations"}};
    if (ev.source == BellSource::SampleMeans) {
        j["sample_size"] = ev.sample.size();
        j["unforced_specimens"] = ev.unforced;
    }
    return j;
}

json bell_json(const Scenario& s, const Population& pop, ExtensionRule rule) {
    json j;
    const SpecimenSet none(pop.size());
    j["quantum"] = bell_eval_json(bell_inequality(s, pop, none, BellSource::QuantumExpectations));

    json means = json::array();
    for (std::size_t c = 0; c < s.contexts.size(); ++c) {
        const auto ids = s.contexts[c].observable_ids();
        if (ids.size() != 2) continue;
        const SpecimenSet members = pop.context_set(c);
        if (members.none()) continue;
        const auto& p = s.observables[ids[0]];
        const auto& q = s.observables[ids[1]];
        const double expected = expectation_pm(s.psi, p.projection, q.projection);
        const double n = static_cast<double>(members.count());
        means.push_back({{"context", s.contexts[c].name()},
                         {"pair", p.name + "*" + q.name},
                         {"n", members.count()},
                         {"mean", mean_product(pop, ids[0], ids[1], members)},
                         {"expected", expected},
                         {"sigma", std::sqrt(std::max(0.0, 1.0 - expected * expected) / n)}});
    }
    j["empirical_means"] = means;

    SpecimenSet valid(pop.size());
    valid.set();
    for (const auto& c : s.correlations) valid &= domain(c, rule, pop);
    if (valid.none()) {
        j["sample_means"] = {{"error", "validity domain is empty under rule " + std::string(to_string(rule))}};
    } else {
        j["sample_means"] = bell_eval_json(bell_inequality(s, pop, valid, BellSource::SampleMeans, rule));
    }
    return j;
}

}  // namespace

json build_report(const RunConfig& input, int& exit_code) {
    const auto started = std::chrono::steady_clock::now();
    RunConfig config = input;
    normalize(config);

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["tool_version"] = kToolVersion;
    report["config"] = config_echo(config);

    auto finish = [&] {
        const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
        report["wall_clock_ms"] = elapsed.count();
        return report;
    };

    std::optional<ScenarioRun> run;
    try {
        run.emplace(make_run(config));
    } catch (const PreconditionError& e) {
        report["status"] = "precondition_failed";
        report["error"] = e.what();
        report["preconditions"] = checks_json(e.checks());
        exit_code = 2;
        return finish();
    }

    const Scenario& s = run->scenario;
    const Population pop = measure_all(run->population, config.seed, config.shards);
    const Verdict v = run_pipeline(s, pop, config.rule, config.shards);

    report["status"] = "ok";
    report["scenario"] = {{"name", s.name}, {"dim", s.psi.dim()}, {"observables", s.observables.size()},
                          {"specimens", pop.size()}};
    json contexts = json::array();
    for (std::size_t c = 0; c < s.contexts.size(); ++c)
        contexts.push_back({{"name", s.contexts[c].name()}, {"count", pop.allocation()[c]}});
    report["scenario"]["contexts"] = contexts;
    report["preconditions"] = checks_json(run->checks);

    json table = json::array();
    for (const auto& row : correlation_table(s, pop))
        table.push_back({{"label", row.label}, {"measured", row.measured}, {"violations", row.violations}});
    report["correlations"] = table;
    if (!s.probabilities.empty()) report["probabilities"] = probability_json(s, pop);

    json domains = json::array();
    for (std::size_t k = 0; k < s.correlations.size(); ++k)
        domains.push_back({{"label", s.correlations[k].label}, {"size", v.domain_sizes[k]}});
    json facts = json::array();
    for (const auto& f : v.facts) facts.push_back({{"name", f.name}, {"cardinality", f.cardinality}, {"empty", f.cardinality == 0}});
    report["verdict"] = {{"rule", std::string(to_string(v.rule))},
                         {"specimens", v.specimens},
                         {"unsat_count", v.unsat_count()},
                         {"unsat_fraction", v.specimens ? double(v.unsat_count()) / double(v.specimens) : 0.0},
                         {"domains", domains},
                         {"set_facts", facts}};
    if (s.bell) report["bell"] = bell_json(s, pop, config.rule);
    exit_code = 0;
    return finish();
}

json report_body(json report) {
    report.erase("wall_clock_ms");
    return report;
}

namespace {

std::string cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void render_table(std::ostringstream& os, const json& rows, const std::string& indent) {
    std::vector<std::string> columns;
    for (const auto& row : rows)
        for (const auto& [k, val] : row.items())
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    std::vector<std::size_t> width;
    for (const auto& c : columns) {
        std::size_t w = c.size();
        for (const auto& row : rows)
            if (row.contains(c)) w = std::max(w, cell(row[c]).size());
        width.push_back(w);
    }
    auto line = [&](auto get) {
        os << indent;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const std::string text = get(i);
            os << text << std::string(width[i] - text.size() + 2, ' ');
        }
        os << "\n";
    };
    line([&](std::size_t i) { return columns[i]; });
    for (const auto& row : rows) line([&](std::size_t i) { return row.contains(columns[i]) ? cell(row[columns[i]]) : std::string("-"); });
}

void render_node(std::ostringstream& os, const std::string& key, const json& v, const std::string& indent) {
    if (v.is_object()) {
        os << indent << key << ":\n";
        for (const auto& [k, child] : v.items()) render_node(os, k, child, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
        os << indent << key << ":\n";
        render_table(os, v, indent + "  ");
    } else {
        os << indent << key << ": " << cell(v) << "\n";
    }
}

}  // namespace

std::string render(const json& report, Format format) {
    if (format == Format::Json) return report.dump(2) + "\n";
    std::ostringstream os;
    for (const auto& [k, v] : report.items()) render_node(os, k, v, "");
    return os.str();
}

void write_atomically(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

}  // namespace nonloc::cli
