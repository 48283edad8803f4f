#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nonloc/population.hpp"
#include "nonloc/scenario.hpp"

using namespace nonloc;

namespace {

std::size_t popcount_over(const Population& pop, const SpecimenSet& s, std::size_t obs) {
    std::size_t n = 0;
    for (auto id : ids_of(s)) n += pop.measured_outcome(id, obs).has_value();
    return n;
}

}  // namespace

TEST_CASE("build_population") {
    SUBCASE("empty population") {
        const auto base = build_ghsz(1);
        const auto& s = base.scenario;
        const Population empty = build_population(s.psi, s.observables, s.contexts, {0, 0, 0, 0}, 0);
        CHECK(empty.size() == 0);
        const Population measured = measure_all(empty, 1);
        CHECK(measured.size() == 0);
        CHECK(set_query(measured, 0, SetKind::Measured).none());
    }

    SUBCASE("ten specimens in one context") {
        const auto base = build_ghsz(1);
        const auto& s = base.scenario;
        const Population pop = build_population(s.psi, s.observables, s.contexts, {10, 0, 0, 0}, 10);
        CHECK(pop.size() == 10);
        CHECK(pop.context_set(0).count() == 10);
        for (std::size_t i = 0; i < 10; ++i) CHECK(pop.context_of(i) == 0);
    }

    SUBCASE("GHSZ audit") {
        const auto run = build_ghsz(1000);
        const Population& pop = run.population;
        CHECK(pop.size() == 4000);
        CHECK_FALSE(pop.measured());
        for (std::size_t c = 0; c < 4; ++c) {
            const SpecimenSet cs = pop.context_set(c);
            CHECK(cs.count() == 1000);
            // ids in context order
            CHECK(ids_of(cs).front() == c * 1000);
            CHECK(ids_of(cs).back() == c * 1000 + 999);
        }
        for (std::size_t o = 0; o < pop.observable_count(); ++o)
            for (std::size_t id = 0; id < pop.size(); id += 97) CHECK_FALSE(pop.measured_outcome(id, o).has_value());
    }

    SUBCASE("precondition errors") {
        const auto base = build_ghsz(1);
        const auto& s = base.scenario;
        CHECK_THROWS_AS(build_population(s.psi, s.observables, s.contexts, {1, 1, 1, 1}, 5), std::invalid_argument);
        CHECK_THROWS_AS(build_population(s.psi, s.observables, s.contexts, {1, 1, 1}, 3), std::invalid_argument);

        auto clashing = s.observables;
        // put two noncommuting observables in separate regions
        clashing[1].region = clashing[0].region + "'";
        CHECK_THROWS_AS(build_population(s.psi, clashing, s.contexts, {1, 1, 1, 1}, 4), std::invalid_argument);

        auto swapped = s.observables;
        std::swap(swapped[2].projection, swapped[3].projection);
        CHECK_THROWS_AS(build_population(s.psi, swapped, s.contexts, {1, 1, 1, 1}, 4), std::invalid_argument);
    }
}

TEST_CASE("measure_all") {
    const auto run = build_ghsz(250);
    const Population a = measure_all(run.population, 77);
    const Population b = measure_all(run.population, 77);
    const Population sharded = measure_all(run.population, 77, 5);
    const Population other = measure_all(run.population, 78);
    CHECK(a.measured());
    CHECK(a.seed() == 77u);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_json() == sharded.to_json());
    CHECK(a.to_json() != other.to_json());
    CHECK_THROWS_AS(measure_all(a, 1), std::logic_error);

    SUBCASE("each specimen measures exactly its context") {
        for (std::size_t id = 0; id < a.size(); ++id) {
            const auto& ctx = a.contexts()[a.context_of(id)];
            for (std::size_t o = 0; o < a.observable_count(); ++o) {
                const bool in_ctx = ctx.contains(o);
                CHECK(a.measured_outcome(id, o).has_value() == in_ctx);
                if (in_ctx) CHECK(a.objective_value(id, o) == a.measured_outcome(id, o));
            }
        }
    }

    SUBCASE("measured set partitions") {
        for (std::size_t o = 0; o < a.observable_count(); ++o) {
            const SpecimenSet m = set_query(a, o, SetKind::Measured);
            const SpecimenSet m1 = set_query(a, o, SetKind::Measured1);
            const SpecimenSet m0 = set_query(a, o, SetKind::Measured0);
            CHECK((m1 & m0).none());
            CHECK((m1 | m0) == m);
            SpecimenSet union_of_contexts(a.size());
            for (std::size_t c = 0; c < a.contexts().size(); ++c)
                if (a.contexts()[c].contains(o)) union_of_contexts |= a.context_set(c);
            CHECK(m == union_of_contexts);
            CHECK(popcount_over(a, m, o) == m.count());
        }
    }
}

TEST_CASE("Bell preset matching context is perfectly anticorrelated") {
    const auto run = build_bell({0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3}, 2000);
    const Population pop = measure_all(run.population, 3);
    const SpecimenSet a1 = set_query(pop, "A_beta", SetKind::Measured1);
    const SpecimenSet b0 = set_query(pop, "B_beta", SetKind::Measured0);
    const SpecimenSet both = set_query(pop, "A_beta", SetKind::Measured) & set_query(pop, "B_beta", SetKind::Measured);
    CHECK((a1 & both) == (b0 & both));
    CHECK((a1 & both).any());
}

TEST_CASE("Hardy (1,0) frequency matches the Born rate") {
    constexpr std::size_t kN = 100000;
    const auto run = build_hardy(kN);
    const Population pop = measure_all(run.population, 9, 4);
    const auto& s = run.scenario;
    const std::size_t aa = s.observable("A_alpha"), bb = s.observable("B_beta");
    const SpecimenSet ctx = set_query(pop, aa, SetKind::Measured) & set_query(pop, bb, SetKind::Measured);
    CHECK(ctx.count() == kN);
    const SpecimenSet hits = ctx & set_query(pop, aa, SetKind::Measured1) & set_query(pop, bb, SetKind::Measured0);
    const double born = 0.0901699;
    const double sigma = std::sqrt(born * (1.0 - born) / kN);
    CHECK(std::abs(hits.count() / double(kN) - born) <= 5.0 * sigma);
}

TEST_CASE("mean_product") {
    const auto run = build_ghsz(50);
    Population pop = measure_all(run.population, 4);
    const std::size_t a = 0, b = 2;

    SUBCASE("identical +-1 values give 1") { CHECK(mean_product(pop, a, a, pop.context_set(0)) == doctest::Approx(1.0)); }

    SUBCASE("hand-built values") {
        // specimens 0 and 1 are in context X, where A_beta is unmeasured
        const std::size_t anchor = pop.observable_id("A_alpha"), free_obs = pop.observable_id("A_beta");
        REQUIRE_FALSE(pop.objective_value(0, free_obs).has_value());
        pop.assign_objective(0, free_obs, *pop.objective_value(0, anchor));
        pop.assign_objective(1, free_obs, 1 - *pop.objective_value(1, anchor));
        SpecimenSet s(pop.size());
        s.set(0);
        CHECK(mean_product(pop, anchor, free_obs, s) == doctest::Approx(1.0));
        s.reset(0);
        s.set(1);
        CHECK(mean_product(pop, anchor, free_obs, s) == doctest::Approx(-1.0));
        s.set(0);
        CHECK(mean_product(pop, anchor, free_obs, s) == doctest::Approx(0.0));
        CHECK_NOTHROW(pop.assign_objective(0, free_obs, *pop.objective_value(0, anchor)));
        CHECK_THROWS_AS(pop.assign_objective(0, free_obs, 1 - *pop.objective_value(0, anchor)), std::logic_error);
        s.set(2);
        CHECK_THROWS_AS(mean_product(pop, anchor, free_obs, s), std::domain_error);
    }

    CHECK_THROWS_AS(mean_product(pop, a, b, SpecimenSet(pop.size())), std::invalid_argument);
}

TEST_CASE("set_query by name") {
    const auto run = build_ghsz(10);
    const Population pop = measure_all(run.population, 1);
    CHECK(set_query(pop, "B", SetKind::Measured).count() == 40);
    CHECK_THROWS_AS(set_query(pop, "nope", SetKind::Measured), std::out_of_range);
    CHECK(set_query(pop, "B", SetKind::Objective1) == set_query(pop, "B", SetKind::Measured1));
}

TEST_CASE("population JSON dump") {
    const auto run = build_hardy(3);
    const Population pop = measure_all(run.population, 12);
    const auto j = pop.to_json();
    CHECK(j.contains("schema_version"));
    CHECK(j.at("specimens").size() == 12);
    CHECK(j.at("observables").size() == pop.observable_count());
    CHECK(j.at("contexts").size() == 4);
    const auto& s0 = j.at("specimens").at(0);
    CHECK(s0.contains("measured"));
    CHECK(s0.contains("objective"));
}
