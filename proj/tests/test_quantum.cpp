#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nonloc/quantum.hpp"
#include "nonloc/scenario.hpp"

using namespace nonloc;

namespace {

StateVector random_state(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g;
    StateVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
    return v.normalized();
}

Operator random_qubit_projection(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return spin_projection(std::acos(2 * u(rng) - 1), 2 * std::numbers::pi * u(rng));
}

StateVector bell_phi_plus() {
    StateVector v(4);
    v[0] = v[3] = 1.0 / std::sqrt(2.0);
    return v;
}

StateVector singlet() {
    StateVector v(4);
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return v;
}

const Operator kZPlus = spin_projection(0.0, 0.0);

}  // namespace

TEST_CASE("kron") {
    CHECK((kron(Operator::identity(2), Operator::identity(2)) - Operator::identity(4)).max_abs() == 0.0);
    CHECK(kron(kZPlus, Operator::zero(2)).max_abs() == 0.0);
    CHECK(kron(kZPlus, Operator::zero(2)).dim() == 4);

    // (|0><0| x |0><0|)(|00> + |11>)/sqrt2 keeps only the |00> amplitude 1/sqrt2
    const StateVector out = kron(kZPlus, kZPlus) * bell_phi_plus();
    CHECK(out.squared_norm() == doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("mixed product property") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 20; ++i) {
            const Operator a = random_qubit_projection(rng) * Complex(0.3, 1.2);
            const Operator b = random_qubit_projection(rng) + Operator::identity(2) * Complex(0.0, 0.5);
            const StateVector v = random_state(rng, 2), w = random_state(rng, 2);
            const StateVector lhs = kron(a, b) * kron(v, w);
            const StateVector rhs = kron(a * v, b * w);
            CHECK((lhs - rhs).norm() < 1e-12);
        }
    }
}

TEST_CASE("is_projection") {
    CHECK(is_projection(Operator::identity(4)));
    CHECK_FALSE(is_projection(Operator::identity(4) * Complex(2.0)));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) CHECK(is_projection(Operator::outer(random_state(rng, 1 + i % 16))));
    Operator non_hermitian(2);
    non_hermitian(0, 1) = 1.0;
    CHECK_FALSE(is_projection(non_hermitian));
}

TEST_CASE("commutes") {
    std::mt19937_64 rng(5);
    const Operator p = random_qubit_projection(rng);
    CHECK(commutes(p, p));
    // |+><+| = [[.5,.5],[.5,.5]], |0><0| = diag(1,0): commutator has off-diagonal +-0.5
    const Operator plus = spin_projection(std::numbers::pi / 2, 0.0);
    CHECK_FALSE(commutes(plus, kZPlus));
    CHECK((plus * kZPlus - kZPlus * plus).max_abs() == doctest::Approx(0.5));
    for (int i = 0; i < 20; ++i) {
        const Operator q = random_qubit_projection(rng), r = random_qubit_projection(rng);
        CHECK(commutes(kron(q, Operator::identity(2)), kron(Operator::identity(2), r)));
    }
    CHECK_THROWS_AS(commutes(Operator::identity(2), Operator::identity(4)), std::invalid_argument);
}

TEST_CASE("joint_probability") {
    const Event certain[] = {{&kZPlus, 1}};
    CHECK(joint_probability(StateVector::basis(2, 0), certain) == doctest::Approx(1.0));

    const Operator z1 = kron(kZPlus, Operator::identity(2)), z2 = kron(Operator::identity(2), kZPlus);
    const Event both[] = {{&z1, 1}, {&z2, 1}};
    CHECK(joint_probability(bell_phi_plus(), both) == doctest::Approx(0.5).epsilon(1e-12));

    const Operator x1 = kron(spin_projection(std::numbers::pi / 2, 0.0), Operator::identity(2));
    const Event clash[] = {{&z1, 1}, {&x1, 1}};
    CHECK_THROWS_AS(joint_probability(bell_phi_plus(), clash), std::invalid_argument);
    const Event bad[] = {{&z1, 2}};
    CHECK_THROWS_AS(joint_probability(bell_phi_plus(), bad), std::invalid_argument);

    SUBCASE("GHSZ context X: tuples with a b c d = -1 carry all the mass") {
        const auto run = build_ghsz(1);
        const auto& ctx = run.scenario.contexts[0];
        double p_minus = 0.0;
        std::vector<Event> ev(4);
        for (std::uint32_t t = 0; t < 16; ++t) {
            int product = 1;
            for (std::size_t i = 0; i < 4; ++i) {
                ev[i] = {&ctx.projections()[i], int((t >> i) & 1u)};
                product *= to_pm(int((t >> i) & 1u));
            }
            if (product == -1) p_minus += joint_probability(run.scenario.psi, ev);
        }
        CHECK(p_minus == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("joint_probability properties on random states") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVector psi = random_state(rng, 8);
        std::vector<Operator> ps;
        for (std::size_t q = 0; q < 3; ++q) ps.push_back(embed(random_qubit_projection(rng), q, 3));
        double total = 0.0;
        for (std::uint32_t t = 0; t < 8; ++t) {
            std::vector<Event> ev;
            for (std::size_t i = 0; i < 3; ++i) ev.push_back({&ps[i], int((t >> i) & 1u)});
            const double p = joint_probability(psi, ev);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            total += p;
            std::swap(ev[0], ev[2]);
            CHECK(std::abs(joint_probability(psi, ev) - p) <= 1e-9);
        }
        CHECK(std::abs(total - 1.0) <= 1e-9);

        // expectation_pm equals the signed sum over outcome pairs
        double signed_sum = 0.0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const Event ev[] = {{&ps[0], x}, {&ps[1], y}};
                signed_sum += to_pm(x) * to_pm(y) * joint_probability(psi, ev);
            }
        CHECK(std::abs(expectation_pm(psi, ps[0], ps[1]) - signed_sum) <= 1e-9);
    }
}

TEST_CASE("expectation_pm") {
    std::mt19937_64 rng(23);
    const Operator p = embed(random_qubit_projection(rng), 0, 2);
    CHECK(expectation_pm(random_state(rng, 4), p, p) == doctest::Approx(1.0));

    for (double deg : {0.0, 17.0, 45.0, 60.0, 90.0, 133.0, 180.0}) {
        const double theta = deg * std::numbers::pi / 180.0;
        const Operator a = embed(spin_projection(0.3, 0.0), 0, 2);
        const Operator b = embed(spin_projection(0.3 + theta, 0.0), 1, 2);
        CHECK(std::abs(expectation_pm(singlet(), a, b) + std::cos(theta)) <= 1e-9);
    }
    const Operator a = embed(spin_projection(0.0, 0.0), 0, 2);
    const Operator b60 = embed(spin_projection(std::numbers::pi / 3, 0.0), 1, 2);
    CHECK(expectation_pm(singlet(), a, b60) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(expectation_pm(singlet(), a, embed(spin_projection(0.0, 0.0), 1, 2)) == doctest::Approx(-1.0));

    const Operator x0 = embed(spin_projection(std::numbers::pi / 2, 0.0), 0, 2);
    CHECK_THROWS_AS(expectation_pm(singlet(), a, x0), std::invalid_argument);
}

TEST_CASE("context validation") {
    const Operator z = embed(kZPlus, 0, 2), x = embed(spin_projection(std::numbers::pi / 2, 0.0), 0, 2);
    CHECK_THROWS_AS(MeasurementContext("bad", {0, 1}, {z, x}), std::invalid_argument);
    CHECK_THROWS_AS(MeasurementContext("dup", {0, 0}, {z, z}), std::invalid_argument);
    CHECK_THROWS_AS(MeasurementContext("not-proj", {0}, {z * Complex(2.0)}), std::invalid_argument);
    CHECK_NOTHROW(MeasurementContext("ok", {0, 1}, {z, embed(kZPlus, 1, 2)}));
}

TEST_CASE("sample") {
    const MeasurementContext zero("z", {0}, {kZPlus});
    for (std::uint64_t id = 0; id < 100; ++id) {
        RngStream stream(1, id);
        CHECK(sample(StateVector::basis(2, 0), zero, stream) == std::vector<int>{1});
    }

    SUBCASE("Bell state (1,1) frequency") {
        const MeasurementContext zz("zz", {0, 1}, {kron(kZPlus, Operator::identity(2)), kron(Operator::identity(2), kZPlus)});
        const OutcomeDistribution dist(bell_phi_plus(), zz);
        constexpr int kDraws = 100000;
        int hits = 0;
        for (int i = 0; i < kDraws; ++i) {
            RngStream stream(99, i);
            if (dist.draw(stream) == 0b11) ++hits;
        }
        const double sigma = std::sqrt(0.25 / kDraws);
        CHECK(std::abs(hits / double(kDraws) - 0.5) <= 5 * sigma);
    }

    SUBCASE("GHSZ context product is -1 on every draw") {
        const auto run = build_ghsz(1);
        for (std::uint64_t id = 0; id < 2000; ++id) {
            RngStream stream(5, id);
            const auto out = sample(run.scenario.psi, run.scenario.contexts[0], stream);
            int product = 1;
            for (int o : out) product *= to_pm(o);
            CHECK(product == -1);
        }
    }

    SUBCASE("deterministic in the stream state") {
        std::mt19937_64 rng(8);
        const StateVector psi = random_state(rng, 4);
        const MeasurementContext ctx("c", {0, 1}, {embed(random_qubit_projection(rng), 0, 2), embed(random_qubit_projection(rng), 1, 2)});
        for (std::uint64_t id = 0; id < 50; ++id) {
            RngStream a(42, id), b(42, id);
            CHECK(sample(psi, ctx, a) == sample(psi, ctx, b));
        }
    }
}

TEST_CASE("sampling frequencies converge for random events") {
    std::mt19937_64 rng(31);
    constexpr int kDraws = 20000;
    for (int trial = 0; trial < 10; ++trial) {
        const StateVector psi = random_state(rng, 4);
        const MeasurementContext ctx("c", {0, 1}, {embed(random_qubit_projection(rng), 0, 2), embed(random_qubit_projection(rng), 1, 2)});
        const OutcomeDistribution dist(psi, ctx);
        std::vector<int> counts(4, 0);
        for (int i = 0; i < kDraws; ++i) {
            RngStream stream(1000 + trial, i);
            ++counts[dist.draw(stream)];
        }
        for (std::uint32_t t = 0; t < 4; ++t) {
            const double p = dist.probability(t);
            const double sigma = std::sqrt(p * (1 - p) / kDraws);
            CHECK(std::abs(counts[t] / double(kDraws) - p) <= 5 * sigma + 1e-12);
        }
    }
}

TEST_CASE("rng streams are counter based") {
    RngStream a(7, 3), b(7, 3), c(7, 4);
    const auto a1 = a.next_u64();
    CHECK(a1 == b.next_u64());
    CHECK(a1 != c.next_u64());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("orthogonal complement") {
    const StateVector e0 = StateVector::basis(2, 0);
    const StateVector v = orthogonal_complement_vector(std::span<const StateVector>(&e0, 1));
    CHECK(std::abs(inner(e0, v)) < 1e-12);
    CHECK(v.is_normalized());
    const StateVector both[] = {StateVector::basis(2, 0), StateVector::basis(2, 1)};
    CHECK_THROWS_AS(orthogonal_complement_vector(both), std::invalid_argument);
}

TEST_CASE("dimension bounds") {
    CHECK_THROWS_AS(Operator(0), std::invalid_argument);
    CHECK_THROWS_AS(Operator(17), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(32), std::invalid_argument);
}
