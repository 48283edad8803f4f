#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nonloc/extension.hpp"
#include "nonloc/linalg.hpp"
#include "nonloc/population.hpp"

namespace nonloc {

struct CommutationAssertion {
    std::string label;
    std::size_t a = 0;
    std::size_t b = 0;
    bool expect_commute = false;
};

/// Asserts a strictly positive Born probability for a joint 1-0 event.
struct ProbabilityAssertion {
    std::string label;
    std::vector<std::pair<std::size_t, int>> events;  // observable -> outcome
};

struct CheckRecord {
    std::string label;
    bool holds = false;
    std::optional<double> value;
};

/// Observable indices and angles of the three-direction Bell setup.
struct BellSetup {
    std::array<std::size_t, 3> a{};  // A^alpha, A^beta, A^gamma
    std::array<std::size_t, 3> b{};  // B^alpha, B^beta, B^gamma
    std::array<double, 3> angles{};  // radians
};

struct Scenario {
    std::string name;
    StateVector psi;
    std::vector<ObservableSpec> observables;
    std::vector<MeasurementContext> contexts;
    std::vector<CorrelationConstraint> correlations;
    std::vector<CommutationAssertion> commutation;
    std::vector<ProbabilityAssertion> probabilities;
    std::vector<SetFact> set_facts;
    std::optional<BellSetup> bell;

    std::size_t observable(const std::string& name) const;
};

/// Raised when a scenario precondition or Born validation fails. Carries every check.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(const std::string& what, std::vector<CheckRecord> checks)
        : std::runtime_error(what), checks_(std::move(checks)) {}
    const std::vector<CheckRecord>& checks() const { return checks_; }

private:
    std::vector<CheckRecord> checks_;
};

/// Born probability that the correlation's relation is satisfied when all of its
/// observables are measured together.
double correlation_certainty(const Scenario& s, const CorrelationConstraint& c, double tol = kTolAlg);

/// Runs every precondition: separated observables commute, declared (non)commutation,
/// each correlation is a probability-1 event, each probability assertion is positive.
std::vector<CheckRecord> run_checks(const Scenario& s, double tol = kTolAlg);

/// run_checks, throwing PreconditionError if anything fails.
std::vector<CheckRecord> validate(const Scenario& s, double tol = kTolAlg);

struct ScenarioRun {
    Scenario scenario;
    std::vector<CheckRecord> checks;
    Population population;  // unmeasured
};

using Allocation = std::vector<std::size_t>;

/// GHZ four-qubit preset; contexts X, Y, Z, T with n_per_context specimens each.
ScenarioRun build_ghsz(std::size_t n_per_context, double tol = kTolAlg);

/// Max-Hardy two-qubit preset. Contexts (A^a,B^a), (A^b,B^a), (A^b,B^b), (A^a,B^b).
ScenarioRun build_hardy(std::size_t n_per_context, std::optional<Allocation> allocation = {}, double tol = kTolAlg);

/// Singlet with planar spin directions at `angles` (radians) for both parties.
/// Contexts (A^a,B^b), (A^a,B^c), (A^b,B^c), (A^c,B^b), (A^b,B^b), (A^c,B^c).
ScenarioRun build_bell(std::array<double, 3> angles, std::size_t n_per_context,
                       std::optional<Allocation> allocation = {}, double tol = kTolAlg);

/// Scenario from a JSON document (see README for the schema).
ScenarioRun load_scenario(const nlohmann::json& doc, std::size_t n_per_context, double tol = kTolAlg);

/// Verdict with the scenario's set facts.
Verdict run_pipeline(const Scenario& s, const Population& pop, ExtensionRule rule, std::size_t shards = 1);

struct CorrelationRow {
    std::string label;
    std::size_t measured = 0;  // specimens with every observable of the correlation measured
    std::size_t violations = 0;
};

/// Violations of each correlation among actually measured outcomes.
std::vector<CorrelationRow> correlation_table(const Scenario& s, const Population& pop);

enum class BellSource { SampleMeans, QuantumExpectations };

struct BellEvaluation {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    BellSource source = BellSource::QuantumExpectations;
    std::vector<std::size_t> sample;
    /// Specimens where some value was not forced; their values were chosen to
    /// maximise lhs - rhs.
    std::size_t unforced = 0;
};

/// |m(a^a b^b) - m(a^a b^c)| <= 1 + m(a^b b^c).
///
/// QuantumExpectations replaces the means by expectation_pm and ignores `sample`.
/// SampleMeans requires `sample` inside the rule's validity domain of every declared
/// correlation (std::domain_error otherwise) and evaluates the supremum of
/// lhs - rhs over all values admitted by each specimen's constraint system; when
/// every value is forced this is the plain sample mean.
BellEvaluation bell_inequality(const Scenario& s, const Population& pop, const SpecimenSet& sample,
                               BellSource source, ExtensionRule rule = ExtensionRule::Seqc);

/// Lowest `k` ids of `set`.
SpecimenSet first_k(const SpecimenSet& set, std::size_t k);

double degrees_to_radians(double deg);

}  // namespace nonloc
