#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nonloc/oracle.hpp"
#include "nonloc/scenario.hpp"

using namespace nonloc;

namespace {

const std::array<double, 3> kDefaultAngles = {0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3};

std::size_t violations(const Scenario& s, const Population& pop) {
    std::size_t n = 0;
    for (const auto& row : correlation_table(s, pop)) n += row.violations;
    return n;
}

const SetFactResult& fact(const Verdict& v, const std::string& name) {
    for (const auto& f : v.facts)
        if (f.name == name) return f;
    throw std::out_of_range(name);
}

}  // namespace

TEST_CASE("GHSZ preset") {
    const auto run = build_ghsz(300);
    const auto& s = run.scenario;
    CHECK(s.observables.size() == 7);
    CHECK(s.contexts.size() == 4);
    for (const auto& c : run.checks) CHECK_MESSAGE(c.holds, c.label);
    CHECK_FALSE(commutes(s.observables[s.observable("A_alpha")].projection, s.observables[s.observable("A_beta")].projection));
    CHECK_THROWS_AS(build_ghsz(0), std::invalid_argument);

    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t d = c + 1; d < 4; ++d) CHECK((run.population.context_set(c) & run.population.context_set(d)).none());

    const Population pop = measure_all(run.population, 7);
    CHECK(violations(s, pop) == 0);
    // a^alpha b = -c^alpha d^alpha on X
    const std::size_t aa = s.observable("A_alpha"), b = s.observable("B"), ca = s.observable("C_alpha"),
                      da = s.observable("D_alpha");
    for (auto x : ids_of(pop.context_set(0))) {
        auto pm = [&](std::size_t o) { return to_pm(*pop.measured_outcome(x, o)); };
        CHECK(pm(aa) * pm(b) == -pm(ca) * pm(da));
    }
}

TEST_CASE("GHSZ under SEQC: no specimen carries all four relations") {
    const auto run = build_ghsz(200);
    const Population pop = measure_all(run.population, 2);
    for (const auto& sys : instantiate(run.scenario.correlations, ExtensionRule::Seqc, pop))
        CHECK(sys.relations.size() < 4);
}

TEST_CASE("Hardy preset") {
    const auto run = build_hardy(1000);
    const auto& s = run.scenario;
    for (const auto& c : run.checks) CHECK_MESSAGE(c.holds, c.label);
    const std::size_t aa = s.observable("A_alpha"), bb = s.observable("B_beta"), ab = s.observable("A_beta"),
                      ba = s.observable("B_alpha");
    CHECK_FALSE(commutes(s.observables[aa].projection, s.observables[ab].projection));
    CHECK_FALSE(commutes(s.observables[ba].projection, s.observables[bb].projection));

    // Born value of (A_alpha=1, B_beta=0) computed from the state
    const Event ev[] = {{&s.observables[aa].projection, 1}, {&s.observables[bb].projection, 0}};
    const double born = joint_probability(s.psi, ev);
    CHECK(born == doctest::Approx(0.0901699).epsilon(1e-6));
    CHECK(std::abs(born - 0.0902) <= 0.005);

    const Population pop = measure_all(run.population, 1);
    CHECK(violations(s, pop) == 0);
    const SpecimenSet first = pop.context_set(0);
    CHECK((first & set_query(pop, aa, SetKind::Measured1) & set_query(pop, ba, SetKind::Measured0)).none());

    SUBCASE("custom allocation") {
        const auto r = build_hardy(0, Allocation{1, 2, 3, 100000});
        CHECK(r.population.size() == 100006);
        const Population p = measure_all(r.population, 5);
        CHECK((set_query(p, aa, SetKind::Measured1) & set_query(p, bb, SetKind::Measured0)).any());
        CHECK_THROWS_AS(build_hardy(1, Allocation{1, 2}), std::invalid_argument);
    }
}

TEST_CASE("Hardy pipelines") {
    const auto run = build_hardy(2000);
    const auto& s = run.scenario;
    const Population pop = measure_all(run.population, 11);
    const SpecimenSet expected =
        set_query(pop, "A_alpha", SetKind::Measured1) & set_query(pop, "B_beta", SetKind::Measured0);
    REQUIRE(expected.any());
    const Verdict eqc = run_pipeline(s, pop, ExtensionRule::Eqc);
    CHECK(eqc.unsat == expected);

    const Verdict seqc = run_pipeline(s, pop, ExtensionRule::Seqc);
    CHECK(seqc.unsat_count() == 0);
    // the triple domain intersection is not empty at the max-Hardy point; what stays
    // empty is its overlap with the blocking event
    CHECK(fact(seqc, "domain_intersection_XYZ").cardinality > 0);
    CHECK(fact(seqc, "domain_intersection_XYZ&A_alpha1&B_beta0").cardinality == 0);
    CHECK(fact(seqc, "A_alpha1&B_beta0").cardinality == expected.count());
}

TEST_CASE("Bell preset") {
    const auto run = build_bell(kDefaultAngles, 500);
    const auto& s = run.scenario;
    REQUIRE(s.bell.has_value());
    for (const auto& c : run.checks) CHECK_MESSAGE(c.holds, c.label);
    for (auto a : s.bell->a)
        for (auto b : s.bell->b) CHECK(commutes(s.observables[a].projection, s.observables[b].projection));

    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const double gap = s.bell->angles[j] - s.bell->angles[i];
            CHECK(std::abs(expectation_pm(s.psi, s.observables[s.bell->a[i]].projection,
                                          s.observables[s.bell->b[j]].projection) +
                           std::cos(gap)) <= 1e-9);
        }

    CHECK_THROWS_AS(build_bell({0.5, 0.5, 0.5}, 10), PreconditionError);
    CHECK_THROWS_AS(build_bell({0.0, std::numbers::pi, 1.0}, 10), PreconditionError);

    const Population pop = measure_all(run.population, 19);
    CHECK(violations(s, pop) == 0);
    const Verdict seqc = run_pipeline(s, pop, ExtensionRule::Seqc);
    CHECK(seqc.unsat_count() == 0);
    CHECK(fact(seqc, "A_alpha&X").cardinality == 0);
    CHECK(fact(seqc, "X").cardinality > 0);
}

TEST_CASE("bell_inequality") {
    const auto run = build_bell(kDefaultAngles, 400);
    const auto& s = run.scenario;
    const Population pop = measure_all(run.population, 8);

    SUBCASE("quantum expectations") {
        const auto q = bell_inequality(s, pop, SpecimenSet(pop.size()), BellSource::QuantumExpectations);
        CHECK(q.lhs == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(q.rhs == doctest::Approx(0.5).epsilon(1e-9));
        CHECK_FALSE(q.holds);
    }

    SUBCASE("samples inside the SEQC domain") {
        const SpecimenSet x = evaluate(s.set_facts[0].expr, pop, s.correlations, ExtensionRule::Seqc);
        REQUIRE(x.any());
        const auto full = bell_inequality(s, pop, x, BellSource::SampleMeans);
        CHECK(full.holds);
        std::mt19937_64 rng(3);
        const auto ids = ids_of(x);
        for (int trial = 0; trial < 50; ++trial) {
            SpecimenSet y(pop.size());
            for (auto id : ids)
                if (rng() & 1u) y.set(id);
            if (y.none()) continue;
            CHECK(bell_inequality(s, pop, y, BellSource::SampleMeans).holds);
        }
    }

    SUBCASE("sample outside the domain") {
        SpecimenSet y(pop.size());
        y.set(ids_of(pop.context_set(0)).front());  // context A_alpha B_beta lies outside X
        CHECK_THROWS_AS(bell_inequality(s, pop, y, BellSource::SampleMeans), std::domain_error);
        CHECK_THROWS_AS(bell_inequality(s, pop, SpecimenSet(pop.size()), BellSource::SampleMeans),
                        std::invalid_argument);
    }

    SUBCASE("a^beta = b^gamma everywhere gives rhs 2") {
        const auto ab = s.bell->a[1], bg = s.bell->b[2];
        SpecimenSet y(pop.size());
        // A_beta B_gamma context, specimens where the two outcomes agree
        for (auto id : ids_of(pop.context_set(2))) {
            if (*pop.measured_outcome(id, ab) != *pop.measured_outcome(id, bg)) continue;
            y.set(id);
        }
        REQUIRE(y.any());
        const auto e = bell_inequality(s, pop, y, BellSource::SampleMeans, ExtensionRule::Eqc);
        CHECK(e.rhs == doctest::Approx(2.0));
        CHECK(e.holds);
    }
}

TEST_CASE("Bell derivation holds on random tables") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 10000; ++trial) {
        const double margin = oracle::bell_margin_for_random_table(rng, 1 + trial % 40);
        REQUIRE(margin >= -1e-12);
    }
}

TEST_CASE("load_scenario") {
    const auto doc = nlohmann::json::parse(R"({
      "name": "two-qubit",
      "qubits": 2,
      "state": {"preset": "singlet"},
      "observables": [
        {"name": "A", "qubit": 0, "theta_deg": 0, "phi_deg": 0, "region": "L"},
        {"name": "A2", "qubit": 0, "theta_deg": 90, "phi_deg": 0, "region": "L"},
        {"name": "B", "qubit": 1, "theta_deg": 0, "phi_deg": 0, "region": "R"},
        {"name": "B2", "qubit": 1, "theta_deg": 90, "phi_deg": 0, "region": "R"}
      ],
      "contexts": [
        {"name": "AB", "observables": ["A", "B"]},
        {"name": "A2B2", "observables": ["A2", "B2"], "count": 7}
      ],
      "correlations": [
        {"kind": "biconditional", "lhs": {"factors": ["A"]}, "rhs": {"factors": ["B"], "negated": true}}
      ],
      "noncommuting": [["A", "A2"]]
    })");
    const auto run = load_scenario(doc, 5);
    CHECK(run.population.size() == 12);
    const Population pop = measure_all(run.population, 1);
    CHECK(violations(run.scenario, pop) == 0);
    CHECK(run_pipeline(run.scenario, pop, ExtensionRule::Eqc).unsat_count() == 0);

    auto broken = doc;
    broken["correlations"][0]["rhs"]["negated"] = false;  // A = B fails on the singlet
    CHECK_THROWS_AS(load_scenario(broken, 5), PreconditionError);
    auto unknown = doc;
    unknown["contexts"][0]["observables"][1] = "Q";
    CHECK_THROWS(load_scenario(unknown, 5));
}
