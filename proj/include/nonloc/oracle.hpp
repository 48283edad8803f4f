#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nonloc/constraints.hpp"

namespace nonloc::oracle {

/// Truth-table evaluation over every symbol below cs.symbol_bound(): tries all 2^k
/// sign vectors, discards rows that disagree with the fixed map, and evaluates each
/// relation arithmetically. Independent of `check`.
bool truth_table_sat(const ConstraintSystem& cs);

/// Arithmetic value of the relation's left side minus right side (0 iff it holds).
long long residual(const Relation& r, const std::vector<int>& values);

/// Random system over `symbols` symbols with up to `max_relations` relations drawn
/// from both relation forms and a random subset of symbols fixed.
ConstraintSystem random_system(std::mt19937_64& rng, std::size_t symbols, std::size_t max_relations);

/// Random +-1 table of `rows` specimens over (a^a, a^b, a^c, b^b, b^c) satisfying
/// b^b = -a^b and b^c = -a^c, then the Bell inequality margin
/// (1 + m(a^b b^c)) - |m(a^a b^b) - m(a^a b^c)| computed from it.
double bell_margin_for_random_table(std::mt19937_64& rng, std::size_t rows);

}  // namespace nonloc::oracle
