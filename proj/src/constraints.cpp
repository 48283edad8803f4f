#include "nonloc/constraints.hpp"

#include <algorithm>
#include <stdexcept>

namespace nonloc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool Relation::holds(std::span<const int> values) const {
    return std::visit(overloaded{[&](const ProductZero& p) {
                                     return std::any_of(p.factors.begin(), p.factors.end(), [&](const AffineFactor& f) {
                                         return f.term.evaluate(values) == -f.offset;
                                     });
                                 },
                                 [&](const MonomialEquality& e) { return e.lhs.evaluate(values) == e.rhs.evaluate(values); }},
                      form);
}

std::vector<std::size_t> Relation::symbols() const {
    std::vector<std::size_t> out;
    std::visit(overloaded{[&](const ProductZero& p) {
                              for (const auto& f : p.factors) out.insert(out.end(), f.term.symbols.begin(), f.term.symbols.end());
                          },
                          [&](const MonomialEquality& e) {
                              out.insert(out.end(), e.lhs.symbols.begin(), e.lhs.symbols.end());
                              out.insert(out.end(), e.rhs.symbols.begin(), e.rhs.symbols.end());
                          }},
               form);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> ConstraintSystem::free_symbols() const {
    std::vector<std::size_t> all;
    for (const auto& r : relations) {
        auto s = r.symbols();
        all.insert(all.end(), s.begin(), s.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::erase_if(all, [&](std::size_t s) {
        return std::any_of(fixed.begin(), fixed.end(), [s](const auto& f) { return f.first == s; });
    });
    return all;
}

std::size_t ConstraintSystem::symbol_bound() const {
    std::size_t bound = 0;
    for (const auto& [s, v] : fixed) bound = std::max(bound, s + 1);
    for (const auto& r : relations)
        for (auto s : r.symbols()) bound = std::max(bound, s + 1);
    return bound;
}

std::size_t for_each_solution(const ConstraintSystem& cs, const std::function<bool(std::span<const int>)>& visit) {
    const auto free = cs.free_symbols();
    if (free.size() > kMaxFreeSymbols)
        throw std::length_error("constraint system for specimen " + std::to_string(cs.specimen) + " has " +
                                std::to_string(free.size()) + " free symbols");
    std::vector<int> values(cs.symbol_bound(), 0);
    for (const auto& [s, v] : cs.fixed) {
        if (v != 1 && v != -1) throw std::invalid_argument("fixed values must be +-1");
        values[s] = v;
    }
    std::size_t found = 0;
    const std::uint32_t combos = std::uint32_t{1} << free.size();
    for (std::uint32_t mask = 0; mask < combos; ++mask) {
        for (std::size_t i = 0; i < free.size(); ++i) values[free[i]] = (mask >> i) & 1u ? 1 : -1;
        const bool ok = std::all_of(cs.relations.begin(), cs.relations.end(),
                                    [&](const Relation& r) { return r.holds(values); });
        if (!ok) continue;
        ++found;
        if (!visit(values)) break;
    }
    return found;
}

CheckResult check(const ConstraintSystem& cs) {
    CheckResult result;
    for_each_solution(cs, [&](std::span<const int> values) {
        result.sat = true;
        std::vector<std::size_t> mentioned;
        for (const auto& [s, v] : cs.fixed) mentioned.push_back(s);
        for (const auto& r : cs.relations) {
            auto s = r.symbols();
            mentioned.insert(mentioned.end(), s.begin(), s.end());
        }
        std::sort(mentioned.begin(), mentioned.end());
        mentioned.erase(std::unique(mentioned.begin(), mentioned.end()), mentioned.end());
        for (auto s : mentioned) result.witness.emplace_back(s, values[s]);
        return false;
    });
    return result;
}

}  // namespace nonloc
