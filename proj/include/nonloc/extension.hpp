#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nonloc/constraints.hpp"
#include "nonloc/population.hpp"

namespace nonloc {

/// Product of observables, optionally negated. A single observable is a one-factor
/// term; A*B (1 - (A - B)^2) is a two-factor term with value a(x) b(x); the negated
/// form 1 - T has value -t(x).
struct Term {
    std::vector<std::size_t> factors;
    bool negated = false;

    static Term single(std::size_t a, bool negated = false) { return {{a}, negated}; }
    static Term composite(std::size_t a, std::size_t b, bool negated = false) { return {{a, b}, negated}; }

    Monomial monomial() const { return {factors, negated ? -1 : 1}; }
};

enum class CorrelationKind { Implication, Biconditional };

/// Quantum correlation between two terms on the specimens where both are measured.
struct CorrelationConstraint {
    CorrelationKind kind = CorrelationKind::Implication;
    Term lhs;
    Term rhs;
    std::string label;

    Relation relation() const;
};

enum class ExtensionRule { MeasuredOnly, Seqc, Eqc };

std::string_view to_string(ExtensionRule rule);
/// Accepts "measured", "seqc", "eqc". Throws std::invalid_argument otherwise.
ExtensionRule parse_rule(std::string_view text);

/// Specimens on which every factor of `t` was measured.
SpecimenSet measured_set(const Population& pop, const Term& t);
/// Measured specimens on which the term took value +1 (resp. -1).
SpecimenSet measured_value_set(const Population& pop, const Term& t, int pm);

/// Specimens on which `c` is asserted under `rule`:
///   MeasuredOnly   measured(lhs) & measured(rhs)
///   Seqc, ->       measured1(lhs) | measured0(rhs) | (measured(lhs) & measured(rhs))
///   Seqc, <->      measured(lhs) | measured(rhs)
///   Eqc            every specimen
SpecimenSet domain(const CorrelationConstraint& c, ExtensionRule rule, const Population& pop);

/// One constraint system per specimen: measured outcomes pinned as +-1, plus the
/// relation of every constraint whose domain contains the specimen.
std::vector<ConstraintSystem> instantiate(std::span<const CorrelationConstraint> constraints, ExtensionRule rule,
                                          const Population& pop);
/// Same, restricted to the specimens of `subset`, in id order.
std::vector<ConstraintSystem> instantiate(std::span<const CorrelationConstraint> constraints, ExtensionRule rule,
                                          const Population& pop, const SpecimenSet& subset);

/// Set expression over a population, evaluated by exact set algebra.
struct SetExpr {
    enum class Op { All, Context, Measured, Measured1, Measured0, Domain, Intersect, Union };
    Op op = Op::All;
    std::size_t index = 0;  // context, observable or constraint index
    std::vector<SetExpr> children;

    static SetExpr all() { return {Op::All, 0, {}}; }
    static SetExpr context(std::size_t c) { return {Op::Context, c, {}}; }
    static SetExpr measured(std::size_t obs) { return {Op::Measured, obs, {}}; }
    static SetExpr measured1(std::size_t obs) { return {Op::Measured1, obs, {}}; }
    static SetExpr measured0(std::size_t obs) { return {Op::Measured0, obs, {}}; }
    static SetExpr domain(std::size_t constraint) { return {Op::Domain, constraint, {}}; }
    static SetExpr intersect(std::vector<SetExpr> xs) { return {Op::Intersect, 0, std::move(xs)}; }
    static SetExpr unite(std::vector<SetExpr> xs) { return {Op::Union, 0, std::move(xs)}; }
};

struct SetFact {
    std::string name;
    SetExpr expr;
};

SpecimenSet evaluate(const SetExpr& expr, const Population& pop, std::span<const CorrelationConstraint> constraints,
                     ExtensionRule rule);

struct SetFactResult {
    std::string name;
    std::size_t cardinality = 0;
};

struct Verdict {
    ExtensionRule rule = ExtensionRule::MeasuredOnly;
    std::size_t specimens = 0;
    SpecimenSet unsat;
    std::vector<std::size_t> domain_sizes;  // per constraint
    std::vector<SetFactResult> facts;

    std::size_t unsat_count() const { return unsat.count(); }
};

/// Checks every specimen's system. Output is identical for any shard count.
Verdict verdict(const Population& pop, std::span<const CorrelationConstraint> constraints, ExtensionRule rule,
                std::span<const SetFact> facts = {}, std::size_t shards = 1);

/// Copies into the objective map every value that is the same in all solutions of a
/// specimen's system under `rule`. UNSAT specimens are left unchanged.
Population apply_extension(const Population& pop, std::span<const CorrelationConstraint> constraints,
                           ExtensionRule rule);

}  // namespace nonloc
