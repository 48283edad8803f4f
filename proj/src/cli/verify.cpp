#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "nonloc/cli.hpp"
#include "nonloc/oracle.hpp"
#include "nonloc/scenario.hpp"

namespace nonloc::cli {

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

std::vector<ScenarioRun> presets(double tol) {
    std::vector<ScenarioRun> runs;
    runs.push_back(build_ghsz(250, tol));
    runs.push_back(build_hardy(500, {}, tol));
    runs.push_back(build_bell({0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3}, 500, {}, tol));
    return runs;
}

Outcome born_normalization(const VerifyOptions& o) {
    double worst = 0.0;
    for (const auto& run : presets(o.tol)) {
        for (const auto& ctx : run.scenario.contexts) {
            double total = 0.0;
            std::vector<Event> events(ctx.size());
            for (std::uint32_t t = 0; t < (1u << ctx.size()); ++t) {
                for (std::size_t i = 0; i < ctx.size(); ++i) events[i] = {&ctx.projections()[i], int((t >> i) & 1u)};
                total += joint_probability(run.scenario.psi, events, o.tol);
            }
            worst = std::max(worst, std::abs(total - 1.0));
        }
    }
    return {worst <= o.tol, "max |sum - 1| = " + std::to_string(worst)};
}

Outcome joint_order(const VerifyOptions& o) {
    const auto run = build_ghsz(1, o.tol);
    double worst = 0.0;
    for (const auto& ctx : run.scenario.contexts) {
        std::vector<Event> events;
        for (std::size_t i = 0; i < ctx.size(); ++i) events.push_back({&ctx.projections()[i], int(i % 2)});
        const double p = joint_probability(run.scenario.psi, events, o.tol);
        std::reverse(events.begin(), events.end());
        worst = std::max(worst, std::abs(p - joint_probability(run.scenario.psi, events, o.tol)));
    }
    return {worst <= o.tol, "max order difference = " + std::to_string(worst)};
}

Outcome expectation_consistency(const VerifyOptions& o) {
    const auto run = build_bell({0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3}, 1, {}, o.tol);
    const auto& s = run.scenario;
    double worst = 0.0;
    for (auto a : s.bell->a)
        for (auto b : s.bell->b) {
            const Operator& p = s.observables[a].projection;
            const Operator& q = s.observables[b].projection;
            double sum = 0.0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) {
                    const Event ev[] = {{&p, x}, {&q, y}};
                    sum += to_pm(x) * to_pm(y) * joint_probability(s.psi, ev, o.tol);
                }
            worst = std::max(worst, std::abs(sum - expectation_pm(s.psi, p, q, o.tol)));
        }
    return {worst <= o.tol, "max deviation = " + std::to_string(worst)};
}

Outcome oracle_equivalence(const VerifyOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::size_t agree = 0;
    constexpr std::size_t kSystems = 1000;
    std::uniform_int_distribution<std::size_t> symbols(1, 7);
    for (std::size_t i = 0; i < kSystems; ++i) {
        const auto cs = oracle::random_system(rng, symbols(rng), 8);
        if (check(cs).sat == oracle::truth_table_sat(cs)) ++agree;
    }
    return {agree == kSystems, std::to_string(agree) + "/" + std::to_string(kSystems) + " agree"};
}

Outcome witness_soundness(const VerifyOptions& o) {
    std::mt19937_64 rng(o.seed + 1);
    std::size_t bad = 0, sat = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const auto cs = oracle::random_system(rng, 7, 8);
        const auto r = check(cs);
        if (!r.sat) continue;
        ++sat;
        std::vector<int> values(cs.symbol_bound(), 1);
        for (const auto& [s, v] : r.witness) values[s] = v;
        bool ok = true;
        for (const auto& [s, v] : cs.fixed) ok = ok && values[s] == v;
        for (const auto& rel : cs.relations) ok = ok && oracle::residual(rel, values) == 0;
        if (!ok) ++bad;
    }
    return {bad == 0, std::to_string(sat) + " witnesses, " + std::to_string(bad) + " unsound"};
}

Outcome seqc_closure(const VerifyOptions& o) {
    auto run = build_hardy(500, {}, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto& s = run.scenario;
    std::size_t violations = 0;
    for (const auto& c : s.correlations) {
        const CorrelationConstraint only[] = {c};
        const auto systems = instantiate(only, ExtensionRule::Seqc, pop);
        const auto dom = domain(c, ExtensionRule::Seqc, pop);
        const auto a = c.lhs.factors[0], b = c.rhs.factors[0];
        for (auto x = dom.find_first(); x != SpecimenSet::npos; x = dom.find_next(x)) {
            const auto r = check(systems[x]);
            if (!r.sat) {
                ++violations;
                continue;
            }
            auto value = [&](std::size_t sym) {
                for (const auto& [k, v] : r.witness)
                    if (k == sym) return v;
                return 0;
            };
            const auto ma = pop.measured_outcome(x, a), mb = pop.measured_outcome(x, b);
            if (ma && *ma == 1 && value(b) != 1) ++violations;
            if (mb && *mb == 0 && value(a) != -1) ++violations;
        }
    }
    return {violations == 0, std::to_string(violations) + " closure violations"};
}

Outcome domain_monotonicity(const VerifyOptions& o) {
    std::size_t failures = 0, strict = 0, total = 0;
    for (std::uint64_t k = 0; k < 10; ++k) {
        for (auto& run : presets(o.tol)) {
            const auto pop = measure_all(run.population, o.seed + k);
            for (const auto& c : run.scenario.correlations) {
                const auto m = domain(c, ExtensionRule::MeasuredOnly, pop);
                const auto w = domain(c, ExtensionRule::Seqc, pop);
                const auto e = domain(c, ExtensionRule::Eqc, pop);
                ++total;
                if (!m.is_subset_of(w) || !w.is_subset_of(e)) ++failures;
                if (w.is_proper_subset_of(e)) ++strict;
            }
        }
    }
    return {failures == 0 && strict == total,
            std::to_string(total - failures) + "/" + std::to_string(total) + " monotone, " + std::to_string(strict) +
                " strict"};
}

std::size_t fact(const Verdict& v, const std::string& name) {
    for (const auto& f : v.facts)
        if (f.name == name) return f.cardinality;
    throw std::out_of_range("no set fact '" + name + "'");
}

Outcome ghsz_eqc(const VerifyOptions& o) {
    auto run = build_ghsz(1000, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto v = run_pipeline(run.scenario, pop, ExtensionRule::Eqc);
    return {v.unsat_count() == pop.size(), std::to_string(v.unsat_count()) + "/" + std::to_string(pop.size()) + " UNSAT"};
}

Outcome ghsz_seqc(const VerifyOptions& o) {
    auto run = build_ghsz(1000, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto v = run_pipeline(run.scenario, pop, ExtensionRule::Seqc);
    const auto quad = fact(v, "domain_intersection_XYZT");
    return {v.unsat_count() == 0 && quad == 0,
            std::to_string(v.unsat_count()) + " UNSAT, quadruple intersection " + std::to_string(quad)};
}

Outcome hardy_eqc(const VerifyOptions& o) {
    auto run = build_hardy(2000, {}, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto v = run_pipeline(run.scenario, pop, ExtensionRule::Eqc);
    const auto& s = run.scenario;
    const auto witnesses = set_query(pop, s.observable("A_alpha"), SetKind::Measured1) &
                           set_query(pop, s.observable("B_beta"), SetKind::Measured0);
    return {v.unsat == witnesses && witnesses.any(), std::to_string(v.unsat_count()) + " UNSAT, " +
                                                         std::to_string(witnesses.count()) + " (1,0) witnesses"};
}

Outcome hardy_seqc(const VerifyOptions& o) {
    auto run = build_hardy(2000, {}, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto v = run_pipeline(run.scenario, pop, ExtensionRule::Seqc);
    const auto blocking = fact(v, "domain_intersection_XYZ&A_alpha1&B_beta0");
    return {v.unsat_count() == 0 && blocking == 0,
            std::to_string(v.unsat_count()) + " UNSAT, X&Y&Z holding a (1,0) witness: " + std::to_string(blocking)};
}

Outcome hardy_rate(const VerifyOptions& o) {
    auto run = build_hardy(20000, {}, o.tol);
    const auto& s = run.scenario;
    const Event ev[] = {{&s.observables[s.observable("A_alpha")].projection, 1},
                        {&s.observables[s.observable("B_beta")].projection, 0}};
    const double born = joint_probability(s.psi, ev, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto ctx = pop.context_set(3);
    const auto hits = (ctx & set_query(pop, s.observable("A_alpha"), SetKind::Measured1) &
                       set_query(pop, s.observable("B_beta"), SetKind::Measured0))
                          .count();
    const double n = static_cast<double>(ctx.count());
    const double freq = hits / n;
    const double sigma = std::sqrt(born * (1 - born) / n);
    return {std::abs(freq - born) <= 5 * sigma,
            "born " + std::to_string(born) + ", observed " + std::to_string(freq)};
}

Outcome bell_violation(const VerifyOptions& o) {
    auto run = build_bell({0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3}, 1, {}, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto ev = bell_inequality(run.scenario, pop, SpecimenSet(pop.size()), BellSource::QuantumExpectations);
    return {!ev.holds && std::abs(ev.lhs - 1.0) <= 0.01 && std::abs(ev.rhs - 0.5) <= 0.01,
            "lhs " + std::to_string(ev.lhs) + ", rhs " + std::to_string(ev.rhs)};
}

Outcome bell_domain(const VerifyOptions& o) {
    auto run = build_bell({0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3}, 1000, {}, o.tol);
    const auto pop = measure_all(run.population, o.seed);
    const auto v = run_pipeline(run.scenario, pop, ExtensionRule::Seqc);
    const auto x = fact(v, "X"), ax = fact(v, "A_alpha&X");
    return {x > 0 && ax == 0 && v.unsat_count() == 0,
            "|X| = " + std::to_string(x) + ", |A_alpha & X| = " + std::to_string(ax)};
}

Outcome bell_fuzz(const VerifyOptions& o) {
    std::mt19937_64 rng(o.seed + 7);
    std::uniform_int_distribution<std::size_t> rows(1, 50);
    std::size_t violations = 0;
    for (int i = 0; i < 10000; ++i)
        if (oracle::bell_margin_for_random_table(rng, rows(rng)) < -1e-12) ++violations;
    return {violations == 0, std::to_string(violations) + " of 10000 tables violate"};
}

Outcome determinism(const VerifyOptions& o) {
    RunConfig config;
    config.scenario = "hardy";
    config.n_per_context = 500;
    config.seed = o.seed;
    int c1 = 0, c2 = 0;
    const auto a = report_body(build_report(config, c1)).dump();
    config.shards = 3;
    const auto b = report_body(build_report(config, c2)).dump();
    return {a == b && c1 == 0 && c2 == 0, a == b ? "identical bodies" : "bodies differ"};
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options) {
    const std::pair<const char*, std::function<Outcome(const VerifyOptions&)>> suites[] = {
        {"born-normalization", born_normalization},
        {"joint-order-independence", joint_order},
        {"expectation-consistency", expectation_consistency},
        {"oracle-equivalence", oracle_equivalence},
        {"witness-soundness", witness_soundness},
        {"seqc-closure", seqc_closure},
        {"domain-monotonicity", domain_monotonicity},
        {"ghsz-eqc-unsat", ghsz_eqc},
        {"ghsz-seqc-empty", ghsz_seqc},
        {"hardy-eqc-unsat", hardy_eqc},
        {"hardy-seqc-empty", hardy_seqc},
        {"hardy-born-rate", hardy_rate},
        {"bell-violation", bell_violation},
        {"bell-domain-23", bell_domain},
        {"bell-derivation-fuzz", bell_fuzz},
        {"report-determinism", determinism},
    };
    std::vector<SuiteResult> results;
    for (const auto& [name, fn] : suites) {
        SuiteResult r{name, false, ""};
        try {
            const auto out = fn(options);
            r.passed = out.passed;
            r.detail = out.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
    const auto results = run_verify_suites(options);
    std::size_t failed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        if (!r.passed) ++failed;
    }
    out << results.size() - failed << "/" << results.size() << " suites passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace nonloc::cli
