#include "nonloc/extension.hpp"

#include <stdexcept>
#include <thread>

namespace nonloc {

Relation CorrelationConstraint::relation() const {
    Relation r;
    r.label = label;
    if (kind == CorrelationKind::Implication) {
        r.form = ProductZero{{AffineFactor{lhs.monomial(), +1}, AffineFactor{rhs.monomial(), -1}}};
    } else {
        r.form = MonomialEquality{lhs.monomial(), rhs.monomial()};
    }
    return r;
}

std::string_view to_string(ExtensionRule rule) {
    switch (rule) {
        case ExtensionRule::MeasuredOnly: return "measured";
        case ExtensionRule::Seqc: return "seqc";
        case ExtensionRule::Eqc: return "eqc";
    }
    return "?";
}

ExtensionRule parse_rule(std::string_view text) {
    if (text == "measured") return ExtensionRule::MeasuredOnly;
    if (text == "seqc") return ExtensionRule::Seqc;
    if (text == "eqc") return ExtensionRule::Eqc;
    throw std::invalid_argument("unknown extension rule '" + std::string(text) + "'");
}

SpecimenSet measured_set(const Population& pop, const Term& t) {
    SpecimenSet set(pop.size());
    set.set();
    for (auto f : t.factors) set &= set_query(pop, f, SetKind::Measured);
    return set;
}

SpecimenSet measured_value_set(const Population& pop, const Term& t, int pm) {
    SpecimenSet base = measured_set(pop, t);
    SpecimenSet out(pop.size());
    for (auto x = base.find_first(); x != SpecimenSet::npos; x = base.find_next(x)) {
        int v = t.negated ? -1 : 1;
        for (auto f : t.factors) v *= to_pm(*pop.measured_outcome(x, f));
        if (v == pm) out.set(x);
    }
    return out;
}

SpecimenSet domain(const CorrelationConstraint& c, ExtensionRule rule, const Population& pop) {
    switch (rule) {
        case ExtensionRule::MeasuredOnly: return measured_set(pop, c.lhs) & measured_set(pop, c.rhs);
        case ExtensionRule::Seqc:
            if (c.kind == CorrelationKind::Implication)
                return measured_value_set(pop, c.lhs, +1) | measured_value_set(pop, c.rhs, -1) |
                       (measured_set(pop, c.lhs) & measured_set(pop, c.rhs));
            return measured_set(pop, c.lhs) | measured_set(pop, c.rhs);
        case ExtensionRule::Eqc: {
            SpecimenSet all(pop.size());
            all.set();
            return all;
        }
    }
    throw std::logic_error("unhandled extension rule");
}

std::vector<ConstraintSystem> instantiate(std::span<const CorrelationConstraint> constraints, ExtensionRule rule,
                                          const Population& pop) {
    SpecimenSet all(pop.size());
    all.set();
    return instantiate(constraints, rule, pop, all);
}

std::vector<ConstraintSystem> instantiate(std::span<const CorrelationConstraint> constraints, ExtensionRule rule,
                                          const Population& pop, const SpecimenSet& subset) {
    if (subset.size() != pop.size()) throw std::invalid_argument("subset does not belong to this population");
    std::vector<SpecimenSet> domains;
    std::vector<Relation> relations;
    for (const auto& c : constraints) {
        domains.push_back(domain(c, rule, pop));
        relations.push_back(c.relation());
    }
    std::vector<ConstraintSystem> systems;
    systems.reserve(subset.count());
    for (auto x = subset.find_first(); x != SpecimenSet::npos; x = subset.find_next(x)) {
        auto& cs = systems.emplace_back();
        cs.specimen = x;
        for (std::size_t o = 0; o < pop.observable_count(); ++o)
            if (auto m = pop.measured_outcome(x, o)) cs.fixed.emplace_back(o, to_pm(*m));
        for (std::size_t k = 0; k < constraints.size(); ++k)
            if (domains[k].test(x)) cs.relations.push_back(relations[k]);
        if (cs.free_symbols().size() > kMaxFreeSymbols)
            throw std::length_error("specimen " + std::to_string(x) + " exceeds the free-symbol bound");
    }
    return systems;
}

SpecimenSet evaluate(const SetExpr& expr, const Population& pop, std::span<const CorrelationConstraint> constraints,
                     ExtensionRule rule) {
    using Op = SetExpr::Op;
    switch (expr.op) {
        case Op::All: {
            SpecimenSet all(pop.size());
            all.set();
            return all;
        }
        case Op::Context: return pop.context_set(expr.index);
        case Op::Measured: return set_query(pop, expr.index, SetKind::Measured);
        case Op::Measured1: return set_query(pop, expr.index, SetKind::Measured1);
        case Op::Measured0: return set_query(pop, expr.index, SetKind::Measured0);
        case Op::Domain:
            if (expr.index >= constraints.size()) throw std::out_of_range("set expression: unknown constraint");
            return domain(constraints[expr.index], rule, pop);
        case Op::Intersect: {
            SpecimenSet acc(pop.size());
            acc.set();
            for (const auto& ch : expr.children) acc &= evaluate(ch, pop, constraints, rule);
            return acc;
        }
        case Op::Union: {
            SpecimenSet acc(pop.size());
            for (const auto& ch : expr.children) acc |= evaluate(ch, pop, constraints, rule);
            return acc;
        }
    }
    throw std::logic_error("unhandled set expression");
}

namespace {

template <class Fn>
void fan_out(std::size_t n, std::size_t shards, Fn&& fn) {
    shards = std::max<std::size_t>(1, std::min(shards, n == 0 ? 1 : n));
    if (shards == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < shards; ++s) workers.emplace_back(fn, s * n / shards, (s + 1) * n / shards);
    for (auto& w : workers) w.join();
}

}  // namespace

Verdict verdict(const Population& pop, std::span<const CorrelationConstraint> constraints, ExtensionRule rule,
                std::span<const SetFact> facts, std::size_t shards) {
    Verdict v;
    v.rule = rule;
    v.specimens = pop.size();
    const auto systems = instantiate(constraints, rule, pop);
    std::vector<char> unsat(pop.size(), 0);
    fan_out(pop.size(), shards, [&](std::size_t begin, std::size_t end) {
        for (std::size_t x = begin; x < end; ++x) unsat[x] = check(systems[x]).sat ? 0 : 1;
    });
    v.unsat.resize(pop.size());
    for (std::size_t x = 0; x < pop.size(); ++x)
        if (unsat[x]) v.unsat.set(x);
    for (const auto& c : constraints) v.domain_sizes.push_back(domain(c, rule, pop).count());
    for (const auto& f : facts) v.facts.push_back({f.name, evaluate(f.expr, pop, constraints, rule).count()});
    return v;
}

Population apply_extension(const Population& pop, std::span<const CorrelationConstraint> constraints,
                           ExtensionRule rule) {
    Population out = pop;
    const auto systems = instantiate(constraints, rule, pop);
    for (const auto& cs : systems) {
        const auto symbols = cs.free_symbols();
        if (symbols.empty()) continue;
        std::vector<int> first;
        std::vector<bool> forced(symbols.size(), true);
        const auto n = for_each_solution(cs, [&](std::span<const int> values) {
            if (first.empty()) {
                for (auto s : symbols) first.push_back(values[s]);
            } else {
                for (std::size_t i = 0; i < symbols.size(); ++i)
                    if (values[symbols[i]] != first[i]) forced[i] = false;
            }
            return true;
        });
        if (n == 0) continue;
        for (std::size_t i = 0; i < symbols.size(); ++i)
            if (forced[i]) out.assign_objective(cs.specimen, symbols[i], to_outcome(first[i]));
    }
    return out;
}

}  // namespace nonloc
