#include "nonloc/oracle.hpp"

#include <cstdlib>
#include <variant>

namespace nonloc::oracle {

namespace {

long long monomial_value(const Monomial& m, const std::vector<int>& values) {
    long long v = m.sign;
    for (auto s : m.symbols) v *= values[s];
    return v;
}

}  // namespace

long long residual(const Relation& r, const std::vector<int>& values) {
    if (const auto* p = std::get_if<ProductZero>(&r.form)) {
        long long prod = 1;
        for (const auto& f : p->factors) prod *= monomial_value(f.term, values) + f.offset;
        return prod;
    }
    const auto& e = std::get<MonomialEquality>(r.form);
    return monomial_value(e.lhs, values) - monomial_value(e.rhs, values);
}

bool truth_table_sat(const ConstraintSystem& cs) {
    const std::size_t k = cs.symbol_bound();
    std::vector<int> values(k);
    for (std::uint64_t row = 0; row < (std::uint64_t{1} << k); ++row) {
        for (std::size_t s = 0; s < k; ++s) values[s] = (row >> s) & 1u ? 1 : -1;
        bool consistent = true;
        for (const auto& [s, v] : cs.fixed) consistent = consistent && values[s] == v;
        if (!consistent) continue;
        bool all = true;
        for (const auto& r : cs.relations) all = all && residual(r, values) == 0;
        if (all) return true;
    }
    return false;
}

ConstraintSystem random_system(std::mt19937_64& rng, std::size_t symbols, std::size_t max_relations) {
    std::uniform_int_distribution<std::size_t> pick(0, symbols - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::size_t> width(1, std::min<std::size_t>(3, symbols));
    auto monomial = [&] {
        Monomial m;
        const auto w = width(rng);
        for (std::size_t i = 0; i < w; ++i) m.symbols.push_back(pick(rng));
        m.sign = coin(rng) ? 1 : -1;
        return m;
    };
    ConstraintSystem cs;
    std::uniform_int_distribution<std::size_t> count(0, max_relations);
    const auto n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Relation r;
        if (coin(rng)) {
            ProductZero p;
            const auto factors = 1 + coin(rng) + coin(rng);
            for (int f = 0; f < factors; ++f) p.factors.push_back({monomial(), coin(rng) ? 1 : -1});
            r.form = p;
        } else {
            r.form = MonomialEquality{monomial(), monomial()};
        }
        cs.relations.push_back(std::move(r));
    }
    for (std::size_t s = 0; s < symbols; ++s)
        if (coin(rng) && coin(rng)) cs.fixed.emplace_back(s, coin(rng) ? 1 : -1);
    return cs;
}

double bell_margin_for_random_table(std::mt19937_64& rng, std::size_t rows) {
    // skewed per-table biases reach the corners where the bound is tight
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double p[3] = {unit(rng), unit(rng), unit(rng)};
    long long ab = 0, ac = 0, bc = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const int a_alpha = unit(rng) < p[0] ? 1 : -1;
        const int a_beta = unit(rng) < p[1] ? 1 : -1;
        const int a_gamma = unit(rng) < p[2] ? 1 : -1;
        const int b_beta = -a_beta;
        const int b_gamma = -a_gamma;
        ab += a_alpha * b_beta;
        ac += a_alpha * b_gamma;
        bc += a_beta * b_gamma;
    }
    const double n = static_cast<double>(rows);
    return (1.0 + bc / n) - std::abs(ab / n - ac / n);
}

}  // namespace nonloc::oracle
