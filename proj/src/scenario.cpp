#include "nonloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace nonloc {

namespace {

MeasurementContext make_context(const Scenario& s, std::string name, const std::vector<std::string>& members,
                                double tol) {
    std::vector<std::size_t> ids;
    std::vector<Operator> projections;
    for (const auto& m : members) {
        ids.push_back(s.observable(m));
        projections.push_back(s.observables[ids.back()].projection);
    }
    return MeasurementContext(std::move(name), std::move(ids), std::move(projections), tol);
}

ScenarioRun finish(Scenario s, Allocation allocation, double tol) {
    auto checks = validate(s, tol);
    const std::size_t total = std::accumulate(allocation.begin(), allocation.end(), std::size_t{0});
    Population pop = build_population(s.psi, s.observables, s.contexts, std::move(allocation), total, tol);
    return {std::move(s), std::move(checks), std::move(pop)};
}

Allocation resolve_allocation(const Scenario& s, std::size_t n_per_context, std::optional<Allocation> allocation) {
    if (allocation) {
        if (allocation->size() != s.contexts.size())
            throw std::invalid_argument(s.name + ": allocation must cover all " + std::to_string(s.contexts.size()) +
                                        " contexts");
        return *allocation;
    }
    if (n_per_context == 0) throw std::invalid_argument(s.name + ": n_per_context must be at least 1");
    return Allocation(s.contexts.size(), n_per_context);
}

std::string term_name(const Scenario& s, const Term& t) {
    std::string out = t.negated ? "1-" : "";
    if (t.factors.size() > 1) out += "(";
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
        if (i) out += "*";
        out += s.observables[t.factors[i]].name;
    }
    if (t.factors.size() > 1) out += ")";
    return out;
}

std::vector<std::size_t> correlation_observables(const CorrelationConstraint& c) {
    std::set<std::size_t> ids(c.lhs.factors.begin(), c.lhs.factors.end());
    ids.insert(c.rhs.factors.begin(), c.rhs.factors.end());
    return {ids.begin(), ids.end()};
}

}  // namespace

double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::size_t Scenario::observable(const std::string& n) const {
    for (std::size_t i = 0; i < observables.size(); ++i)
        if (observables[i].name == n) return i;
    throw std::out_of_range(name + ": unknown observable '" + n + "'");
}

double correlation_certainty(const Scenario& s, const CorrelationConstraint& c, double tol) {
    const auto ids = correlation_observables(c);
    std::vector<Event> events(ids.size());
    std::vector<int> values(s.observables.size(), 0);
    const Relation rel = c.relation();
    double p_sat = 0.0;
    for (std::uint32_t t = 0; t < (1u << ids.size()); ++t) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const int outcome = int((t >> i) & 1u);
            events[i] = {&s.observables[ids[i]].projection, outcome};
            values[ids[i]] = to_pm(outcome);
        }
        if (rel.holds(values)) p_sat += joint_probability(s.psi, events, tol);
    }
    return p_sat;
}

std::vector<CheckRecord> run_checks(const Scenario& s, double tol) {
    std::vector<CheckRecord> checks;

    bool separated_ok = true;
    for (std::size_t i = 0; i < s.observables.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (separated(s.observables[i], s.observables[j]) &&
                !commutes(s.observables[i].projection, s.observables[j].projection, tol))
                separated_ok = false;
    checks.push_back({"separated observables commute", separated_ok, std::nullopt});

    for (const auto& a : s.commutation) {
        const bool c = commutes(s.observables[a.a].projection, s.observables[a.b].projection, tol);
        checks.push_back({a.label, c == a.expect_commute, std::nullopt});
    }

    for (const auto& c : s.correlations) {
        const auto ids = correlation_observables(c);
        bool jointly = true;
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                jointly = jointly && commutes(s.observables[ids[i]].projection, s.observables[ids[j]].projection, tol);
        if (!jointly) {
            checks.push_back({"P(" + c.label + ") = 1", false, std::nullopt});
            continue;
        }
        const double p = correlation_certainty(s, c, tol);
        checks.push_back({"P(" + c.label + ") = 1", p >= 1.0 - tol, p});
    }

    for (const auto& pa : s.probabilities) {
        std::vector<Event> events;
        for (const auto& [obs, outcome] : pa.events) events.push_back({&s.observables[obs].projection, outcome});
        double p = 0.0;
        bool ok = true;
        try {
            p = joint_probability(s.psi, events, tol);
        } catch (const std::invalid_argument&) {
            ok = false;
        }
        checks.push_back({pa.label, ok && p > tol, p});
    }
    return checks;
}

std::vector<CheckRecord> validate(const Scenario& s, double tol) {
    auto checks = run_checks(s, tol);
    for (const auto& c : checks)
        if (!c.holds) throw PreconditionError(s.name + ": precondition failed: " + c.label, checks);
    return checks;
}

ScenarioRun build_ghsz(std::size_t n_per_context, double tol) {
    if (n_per_context == 0) throw std::invalid_argument("ghsz: n_per_context must be at least 1");
    constexpr double kHalfPi = std::numbers::pi / 2;
    Scenario s;
    s.name = "ghsz";
    StateVector ghz(16);
    ghz[0] = ghz[15] = 1.0 / std::sqrt(2.0);
    s.psi = ghz;

    // equatorial spins: phi = 0 is sigma_x, phi = pi/2 is sigma_y
    struct Spec {
        const char* name;
        std::size_t qubit;
        double phi;
        const char* region;
    };
    const Spec specs[] = {{"A_alpha", 0, 0.0, "R1"},     {"A_beta", 0, kHalfPi, "R1"}, {"B", 1, 0.0, "R2"},
                          {"C_alpha", 2, kHalfPi, "R3"}, {"C_beta", 2, 0.0, "R3"},     {"D_alpha", 3, kHalfPi, "R4"},
                          {"D_beta", 3, 0.0, "R4"}};
    for (const auto& sp : specs)
        s.observables.push_back({sp.name, embed(spin_projection(kHalfPi, sp.phi), sp.qubit, 4), sp.region});

    s.contexts.push_back(make_context(s, "X", {"A_alpha", "B", "C_alpha", "D_alpha"}, tol));
    s.contexts.push_back(make_context(s, "Y", {"A_beta", "B", "C_beta", "D_alpha"}, tol));
    s.contexts.push_back(make_context(s, "Z", {"A_beta", "B", "C_alpha", "D_beta"}, tol));
    s.contexts.push_back(make_context(s, "T", {"A_alpha", "B", "C_beta", "D_beta"}, tol));

    auto o = [&](const char* n) { return s.observable(n); };
    auto add = [&](const char* a, const char* c, const char* d, bool negated) {
        CorrelationConstraint cc{CorrelationKind::Biconditional, Term::composite(o(a), o("B")),
                                 Term::composite(o(c), o(d), negated), ""};
        cc.label = term_name(s, cc.lhs) + " <-> " + term_name(s, cc.rhs);
        s.correlations.push_back(cc);
    };
    add("A_alpha", "C_alpha", "D_alpha", true);
    add("A_beta", "C_beta", "D_alpha", true);
    add("A_beta", "C_alpha", "D_beta", true);
    add("A_alpha", "C_beta", "D_beta", false);

    for (auto [x, y] : {std::pair{"A_alpha", "A_beta"}, {"C_alpha", "C_beta"}, {"D_alpha", "D_beta"}})
        s.commutation.push_back({std::string("[") + x + "," + y + "] != 0", o(x), o(y), false});

    s.set_facts.push_back({"domain_intersection_XYZT",
                           SetExpr::intersect({SetExpr::domain(0), SetExpr::domain(1), SetExpr::domain(2),
                                               SetExpr::domain(3)})});
    auto pair = [&](const char* a, const char* b) {
        return SetExpr::intersect({SetExpr::measured(o(a)), SetExpr::measured(o(b))});
    };
    const std::pair<const char*, const char*> pairs[] = {{"A_alpha", "B"}, {"A_beta", "B"},     {"C_alpha", "D_alpha"},
                                                         {"C_beta", "D_alpha"}, {"C_alpha", "D_beta"},
                                                         {"C_beta", "D_beta"}};
    // pairwise disjointness of the measured composite sets
    const std::pair<int, int> disjoint[] = {{0, 1}, {2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}};
    for (auto [i, j] : disjoint) {
        const auto& p = pairs[i];
        const auto& q = pairs[j];
        s.set_facts.push_back({std::string("(") + p.first + "*" + p.second + ")&(" + q.first + "*" + q.second + ")",
                               SetExpr::intersect({pair(p.first, p.second), pair(q.first, q.second)})});
    }
    return finish(std::move(s), Allocation(4, n_per_context), tol);
}

ScenarioRun build_hardy(std::size_t n_per_context, std::optional<Allocation> allocation, double tol) {
    Scenario s;
    s.name = "hardy";
    // cos^2(theta) = (sqrt5 - 1)/2 maximises P(A_alpha = 1, B_beta = 0)
    const double theta = std::acos(std::sqrt((std::sqrt(5.0) - 1.0) / 2.0));
    auto ket = [](double t) { return StateVector{std::cos(t), std::sin(t)}; };
    auto perp = [](double t) { return StateVector{-std::sin(t), std::cos(t)}; };
    const double a_alpha = 0.0, a_beta = theta, b_alpha = theta, b_beta = 0.0;

    const StateVector forbidden[] = {kron(ket(a_alpha), perp(b_alpha)), kron(perp(a_beta), ket(b_alpha)),
                                     kron(ket(a_beta), perp(b_beta))};
    s.psi = orthogonal_complement_vector(forbidden, tol);

    auto proj = [](double t, std::size_t qubit) { return embed(spin_projection(2.0 * t, 0.0), qubit, 2); };
    s.observables = {{"A_alpha", proj(a_alpha, 0), "R1"},
                     {"A_beta", proj(a_beta, 0), "R1"},
                     {"B_alpha", proj(b_alpha, 1), "R2"},
                     {"B_beta", proj(b_beta, 1), "R2"}};
    auto o = [&](const char* n) { return s.observable(n); };

    s.contexts.push_back(make_context(s, "AaBa", {"A_alpha", "B_alpha"}, tol));
    s.contexts.push_back(make_context(s, "AbBa", {"A_beta", "B_alpha"}, tol));
    s.contexts.push_back(make_context(s, "AbBb", {"A_beta", "B_beta"}, tol));
    s.contexts.push_back(make_context(s, "AaBb", {"A_alpha", "B_beta"}, tol));

    auto imp = [&](const char* a, const char* b) {
        s.correlations.push_back({CorrelationKind::Implication, Term::single(o(a)), Term::single(o(b)),
                                  std::string(a) + " -> " + b});
    };
    imp("A_alpha", "B_alpha");
    imp("B_alpha", "A_beta");
    imp("A_beta", "B_beta");

    s.commutation.push_back({"[A_alpha,A_beta] != 0", o("A_alpha"), o("A_beta"), false});
    s.commutation.push_back({"[B_alpha,B_beta] != 0", o("B_alpha"), o("B_beta"), false});
    s.probabilities.push_back({"P(A_alpha=1, B_beta=0) > 0", {{o("A_alpha"), 1}, {o("B_beta"), 0}}});

    s.set_facts.push_back(
        {"domain_intersection_XYZ", SetExpr::intersect({SetExpr::domain(0), SetExpr::domain(1), SetExpr::domain(2)})});
    s.set_facts.push_back({"domain_intersection_XYZ&A_alpha1&B_beta0",
                           SetExpr::intersect({SetExpr::domain(0), SetExpr::domain(1), SetExpr::domain(2),
                                               SetExpr::measured1(o("A_alpha")), SetExpr::measured0(o("B_beta"))})});
    s.set_facts.push_back({"A_alpha1&B_beta0",
                           SetExpr::intersect({SetExpr::measured1(o("A_alpha")), SetExpr::measured0(o("B_beta"))})});
    auto either = [&](const char* a, const char* b) {
        return SetExpr::unite({SetExpr::measured(o(a)), SetExpr::measured(o(b))});
    };
    s.set_facts.push_back({"(A_alpha|B_alpha)&(A_beta|B_alpha)&(A_beta|B_beta)",
                           SetExpr::intersect({either("A_alpha", "B_alpha"), either("A_beta", "B_alpha"),
                                               either("A_beta", "B_beta")})});

    auto alloc = resolve_allocation(s, n_per_context, std::move(allocation));
    return finish(std::move(s), std::move(alloc), tol);
}

ScenarioRun build_bell(std::array<double, 3> angles, std::size_t n_per_context, std::optional<Allocation> allocation,
                       double tol) {
    Scenario s;
    s.name = "bell";
    StateVector singlet(4);
    singlet[1] = 1.0 / std::sqrt(2.0);
    singlet[2] = -1.0 / std::sqrt(2.0);
    s.psi = singlet;

    const char* suffix[] = {"alpha", "beta", "gamma"};
    BellSetup setup;
    setup.angles = angles;
    for (std::size_t k = 0; k < 3; ++k) {
        setup.a[k] = s.observables.size();
        s.observables.push_back(
            {std::string("A_") + suffix[k], embed(spin_projection(angles[k], 0.0), 0, 2), "R1"});
    }
    for (std::size_t k = 0; k < 3; ++k) {
        setup.b[k] = s.observables.size();
        s.observables.push_back(
            {std::string("B_") + suffix[k], embed(spin_projection(angles[k], 0.0), 1, 2), "R2"});
    }
    s.bell = setup;

    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            s.commutation.push_back({"[A_" + std::string(suffix[j]) + ",A_" + suffix[i] + "] != 0", setup.a[j],
                                     setup.a[i], false});
            s.commutation.push_back({"[B_" + std::string(suffix[j]) + ",B_" + suffix[i] + "] != 0", setup.b[j],
                                     setup.b[i], false});
        }

    // degenerate directions make some pair coincide; contexts below would still be
    // valid, so the scenario is rejected through the commutation checks first
    auto rejected = run_checks(s, tol);
    for (const auto& c : rejected)
        if (!c.holds) throw PreconditionError("bell: precondition failed: " + c.label, rejected);

    const std::pair<int, int> ctx[] = {{0, 1}, {0, 2}, {1, 2}, {2, 1}, {1, 1}, {2, 2}};
    const char* short_name[] = {"a", "b", "c"};
    for (auto [i, j] : ctx)
        s.contexts.push_back(make_context(s, std::string("A") + short_name[i] + "B" + short_name[j],
                                          {s.observables[setup.a[i]].name, s.observables[setup.b[j]].name}, tol));

    for (std::size_t k = 1; k < 3; ++k)
        s.correlations.push_back({CorrelationKind::Biconditional, Term::single(setup.a[k]),
                                  Term::single(setup.b[k], true),
                                  s.observables[setup.a[k]].name + " <-> 1-" + s.observables[setup.b[k]].name});

    s.set_facts.push_back({"X", SetExpr::intersect({SetExpr::domain(0), SetExpr::domain(1)})});
    s.set_facts.push_back(
        {"A_alpha&X", SetExpr::intersect({SetExpr::measured(setup.a[0]), SetExpr::domain(0), SetExpr::domain(1)})});
    s.set_facts.push_back({"(A_beta|B_beta)&(A_gamma|B_gamma)",
                           SetExpr::intersect({SetExpr::unite({SetExpr::measured(setup.a[1]), SetExpr::measured(setup.b[1])}),
                                               SetExpr::unite({SetExpr::measured(setup.a[2]), SetExpr::measured(setup.b[2])})})});

    auto alloc = resolve_allocation(s, n_per_context, std::move(allocation));
    return finish(std::move(s), std::move(alloc), tol);
}

Verdict run_pipeline(const Scenario& s, const Population& pop, ExtensionRule rule, std::size_t shards) {
    if (!pop.measured()) throw std::logic_error("run_pipeline requires a measured population");
    return verdict(pop, s.correlations, rule, s.set_facts, shards);
}

std::vector<CorrelationRow> correlation_table(const Scenario& s, const Population& pop) {
    std::vector<CorrelationRow> rows;
    std::vector<int> values(pop.observable_count(), 0);
    for (const auto& c : s.correlations) {
        CorrelationRow row{c.label, 0, 0};
        const Relation rel = c.relation();
        const auto ids = correlation_observables(c);
        const SpecimenSet dom = domain(c, ExtensionRule::MeasuredOnly, pop);
        row.measured = dom.count();
        for (auto x = dom.find_first(); x != SpecimenSet::npos; x = dom.find_next(x)) {
            for (auto id : ids) values[id] = to_pm(*pop.measured_outcome(x, id));
            if (!rel.holds(values)) ++row.violations;
        }
        rows.push_back(row);
    }
    return rows;
}

SpecimenSet first_k(const SpecimenSet& set, std::size_t k) {
    SpecimenSet out(set.size());
    std::size_t taken = 0;
    for (auto x = set.find_first(); x != SpecimenSet::npos && taken < k; x = set.find_next(x), ++taken) out.set(x);
    return out;
}

BellEvaluation bell_inequality(const Scenario& s, const Population& pop, const SpecimenSet& sample, BellSource source,
                               ExtensionRule rule) {
    if (!s.bell) throw std::invalid_argument(s.name + ": not a Bell scenario");
    const auto& bs = *s.bell;
    const std::size_t aa = bs.a[0], ab = bs.a[1], bb = bs.b[1], bc = bs.b[2];
    BellEvaluation ev;
    ev.source = source;

    if (source == BellSource::QuantumExpectations) {
        const auto& obs = s.observables;
        const double m_ab = expectation_pm(s.psi, obs[aa].projection, obs[bb].projection);
        const double m_ac = expectation_pm(s.psi, obs[aa].projection, obs[bc].projection);
        const double m_bc = expectation_pm(s.psi, obs[ab].projection, obs[bc].projection);
        ev.lhs = std::abs(m_ab - m_ac);
        ev.rhs = 1.0 + m_bc;
        ev.holds = ev.lhs <= ev.rhs + 1e-12;
        return ev;
    }

    if (sample.size() != pop.size()) throw std::invalid_argument("sample does not belong to this population");
    if (sample.none()) throw std::invalid_argument("bell_inequality: empty sample");
    SpecimenSet valid(pop.size());
    valid.set();
    for (const auto& c : s.correlations) valid &= domain(c, rule, pop);
    if (!sample.is_subset_of(valid))
        throw std::domain_error("bell_inequality: sample lies outside the validity domain under rule " +
                                std::string(to_string(rule)));

    const auto systems = instantiate(s.correlations, rule, pop, sample);
    const std::size_t needed[] = {aa, ab, bb, bc};
    // per sign s: the completion maximising s*f - g, f = a^a (b^b - b^c), g = a^b b^c
    long long sum_f[2] = {0, 0}, sum_g[2] = {0, 0}, best_total[2] = {0, 0};
    std::vector<int> v(pop.observable_count(), 0);
    for (const auto& cs : systems) {
        const std::size_t x = cs.specimen;
        const auto frees = cs.free_symbols();
        std::vector<std::size_t> loose;
        for (auto sym : needed) {
            const bool fixed = std::any_of(cs.fixed.begin(), cs.fixed.end(), [&](const auto& f) { return f.first == sym; });
            const bool in_rel = std::find(frees.begin(), frees.end(), sym) != frees.end();
            if (!fixed && !in_rel) loose.push_back(sym);
        }
        bool have[2] = {false, false};
        long long best[2] = {0, 0}, bf[2] = {0, 0}, bg[2] = {0, 0};
        std::size_t completions = 0;
        std::array<int, 4> first_values{};
        bool varies = false;
        for_each_solution(cs, [&](std::span<const int> solved) {
            std::fill(v.begin(), v.end(), 0);
            std::copy(solved.begin(), solved.end(), v.begin());
            for (std::uint32_t m = 0; m < (1u << loose.size()); ++m) {
                for (std::size_t i = 0; i < loose.size(); ++i) v[loose[i]] = (m >> i) & 1u ? 1 : -1;
                const std::array<int, 4> key = {v[aa], v[ab], v[bb], v[bc]};
                if (completions == 0) first_values = key;
                else if (key != first_values) varies = true;
                ++completions;
                const long long f = v[aa] * (v[bb] - v[bc]);
                const long long g = v[ab] * v[bc];
                for (int k = 0; k < 2; ++k) {
                    const long long sign = k == 0 ? 1 : -1;
                    const long long score = sign * f - g;
                    if (!have[k] || score > best[k]) {
                        have[k] = true;
                        best[k] = score;
                        bf[k] = f;
                        bg[k] = g;
                    }
                }
            }
            return true;
        });
        if (completions == 0)
            throw std::domain_error("bell_inequality: specimen " + std::to_string(x) + " is inconsistent under rule " +
                                    std::string(to_string(rule)));
        if (varies) ++ev.unforced;
        for (int k = 0; k < 2; ++k) {
            sum_f[k] += bf[k];
            sum_g[k] += bg[k];
            best_total[k] += best[k];
        }
        ev.sample.push_back(x);
    }
    const int k = best_total[0] >= best_total[1] ? 0 : 1;
    const auto n = static_cast<long long>(ev.sample.size());
    ev.lhs = static_cast<double>(std::llabs(sum_f[k])) / static_cast<double>(n);
    ev.rhs = 1.0 + static_cast<double>(sum_g[k]) / static_cast<double>(n);
    ev.holds = std::llabs(sum_f[k]) <= n + sum_g[k];
    return ev;
}

}  // namespace nonloc
