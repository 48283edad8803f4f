#include <cmath>
#include <stdexcept>

#include "nonloc/scenario.hpp"

namespace nonloc {

namespace {

using nlohmann::json;

StateVector parse_state(const json& doc, std::size_t qubits) {
    const std::size_t dim = std::size_t{1} << qubits;
    if (doc.contains("preset")) {
        const auto name = doc.at("preset").get<std::string>();
        StateVector v(dim);
        const double r = 1.0 / std::sqrt(2.0);
        if (name == "ghz") {
            v[0] = v[dim - 1] = r;
        } else if (name == "singlet" && qubits == 2) {
            v[1] = r;
            v[2] = -r;
        } else if (name == "phi_plus" && qubits == 2) {
            v[0] = v[3] = r;
        } else {
            throw std::invalid_argument("unknown state preset '" + name + "' for " + std::to_string(qubits) + " qubits");
        }
        return v;
    }
    const auto& amps = doc.at("amplitudes");
    if (amps.size() != dim) throw std::invalid_argument("state needs " + std::to_string(dim) + " amplitudes");
    std::vector<Complex> values;
    for (const auto& a : amps) {
        if (a.is_number()) values.emplace_back(a.get<double>(), 0.0);
        else values.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    }
    StateVector v(std::move(values));
    // amplitudes may be given unnormalised
    return v.normalized();
}

Term parse_term(const Scenario& s, const json& doc) {
    Term t;
    t.negated = doc.value("negated", false);
    for (const auto& f : doc.at("factors")) t.factors.push_back(s.observable(f.get<std::string>()));
    if (t.factors.empty()) throw std::invalid_argument("correlation term without factors");
    return t;
}

}  // namespace

ScenarioRun load_scenario(const json& doc, std::size_t n_per_context, double tol) {
    Scenario s;
    s.name = doc.value("name", std::string("custom"));
    const auto qubits = doc.at("qubits").get<std::size_t>();
    if (qubits == 0 || (std::size_t{1} << qubits) > kMaxDim)
        throw std::invalid_argument("qubit count must give a dimension in [2, 16]");
    s.psi = parse_state(doc.at("state"), qubits);

    for (const auto& o : doc.at("observables")) {
        const auto qubit = o.at("qubit").get<std::size_t>();
        const double theta = degrees_to_radians(o.value("theta_deg", 0.0));
        const double phi = degrees_to_radians(o.value("phi_deg", 0.0));
        s.observables.push_back(
            {o.at("name").get<std::string>(), embed(spin_projection(theta, phi), qubit, qubits), o.at("region").get<std::string>()});
    }

    Allocation allocation;
    for (const auto& c : doc.at("contexts")) {
        std::vector<std::size_t> ids;
        std::vector<Operator> projections;
        for (const auto& m : c.at("observables")) {
            ids.push_back(s.observable(m.get<std::string>()));
            projections.push_back(s.observables[ids.back()].projection);
        }
        s.contexts.emplace_back(c.at("name").get<std::string>(), std::move(ids), std::move(projections), tol);
        allocation.push_back(c.value("count", n_per_context));
    }

    for (const auto& c : doc.value("correlations", json::array())) {
        const auto kind = c.at("kind").get<std::string>();
        CorrelationConstraint cc;
        if (kind == "implication") cc.kind = CorrelationKind::Implication;
        else if (kind == "biconditional") cc.kind = CorrelationKind::Biconditional;
        else throw std::invalid_argument("unknown correlation kind '" + kind + "'");
        cc.lhs = parse_term(s, c.at("lhs"));
        cc.rhs = parse_term(s, c.at("rhs"));
        cc.label = c.value("label", "correlation " + std::to_string(s.correlations.size()));
        s.correlations.push_back(std::move(cc));
    }

    for (const auto& key : {"noncommuting", "commuting"}) {
        const bool expect = std::string(key) == "commuting";
        for (const auto& p : doc.value(key, json::array())) {
            const auto a = p.at(0).get<std::string>(), b = p.at(1).get<std::string>();
            s.commutation.push_back({"[" + a + "," + b + (expect ? "] = 0" : "] != 0"), s.observable(a),
                                     s.observable(b), expect});
        }
    }

    for (const auto& pa : doc.value("positive_probabilities", json::array())) {
        ProbabilityAssertion a;
        a.label = pa.value("label", std::string("positive probability"));
        for (const auto& e : pa.at("events"))
            a.events.emplace_back(s.observable(e.at("observable").get<std::string>()), e.at("outcome").get<int>());
        s.probabilities.push_back(std::move(a));
    }

    if (!s.correlations.empty()) {
        std::vector<SetExpr> all;
        for (std::size_t k = 0; k < s.correlations.size(); ++k) all.push_back(SetExpr::domain(k));
        s.set_facts.push_back({"domain_intersection", SetExpr::intersect(std::move(all))});
    }

    auto checks = validate(s, tol);
    std::size_t total = 0;
    for (auto n : allocation) total += n;
    Population pop = build_population(s.psi, s.observables, s.contexts, allocation, total, tol);
    return {std::move(s), std::move(checks), std::move(pop)};
}

}  // namespace nonloc
