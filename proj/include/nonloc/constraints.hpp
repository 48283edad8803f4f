#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nonloc {

/// Product of +-1 symbols with a sign: sign * prod_i v[symbols[i]].
struct Monomial {
    std::vector<std::size_t> symbols;
    int sign = 1;

    int evaluate(std::span<const int> values) const {
        int v = sign;
        for (auto s : symbols) v *= values[s];
        return v;
    }
};

/// monomial + offset, offset in {+1, -1}.
struct AffineFactor {
    Monomial term;
    int offset = 1;
};

/// prod_i (m_i + c_i) = 0. The implication A -> B is (a + 1)(b - 1) = 0.
struct ProductZero {
    std::vector<AffineFactor> factors;
};

/// lhs = rhs. The biconditional A <-> B is a = b.
struct MonomialEquality {
    Monomial lhs;
    Monomial rhs;
};

struct Relation {
    std::variant<ProductZero, MonomialEquality> form;
    std::string label;

    bool holds(std::span<const int> values) const;
    std::vector<std::size_t> symbols() const;
};

/// Search bound for free symbols per system.
inline constexpr std::size_t kMaxFreeSymbols = 12;

/// Relations a single specimen must satisfy, with its measured values pinned.
struct ConstraintSystem {
    std::size_t specimen = 0;
    std::vector<std::pair<std::size_t, int>> fixed;  // symbol -> +-1
    std::vector<Relation> relations;

    std::vector<std::size_t> free_symbols() const;
    /// One past the largest symbol referenced.
    std::size_t symbol_bound() const;
};

struct CheckResult {
    bool sat = false;
    /// Values of every fixed and relation symbol; empty when UNSAT.
    std::vector<std::pair<std::size_t, int>> witness;
};

/// Exhaustive search over +-1 assignments of the free symbols. Throws
/// std::length_error when more than kMaxFreeSymbols are free and
/// std::invalid_argument when a fixed value is not +-1.
CheckResult check(const ConstraintSystem& cs);

/// Calls `visit` with the full value vector (indexed by symbol, 0 for symbols the
/// system does not mention) of every satisfying assignment. Return false from
/// `visit` to stop. Returns the number of solutions visited.
std::size_t for_each_solution(const ConstraintSystem& cs, const std::function<bool(std::span<const int>)>& visit);

}  // namespace nonloc
