#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include "json.hpp"

#include "nonloc/linalg.hpp"
#include "nonloc/quantum.hpp"

namespace nonloc {

/// Set of specimen ids, one bit per specimen of a population.
using SpecimenSet = boost::dynamic_bitset<>;

std::vector<std::size_t> ids_of(const SpecimenSet& set);

/// A 1-0 observable located in a spacetime region. Distinct regions are separated.
struct ObservableSpec {
    std::string name;
    Operator projection;
    std::string region;
};

inline bool separated(const ObservableSpec& a, const ObservableSpec& b) { return a.region != b.region; }

enum class SetKind { Measured, Measured1, Measured0, Objective1, Objective0 };

/// Materialised record of one specimen.
struct Specimen {
    std::size_t id = 0;
    std::size_t context = 0;
    std::vector<std::pair<std::size_t, int>> measured;   // observable id -> outcome 1/0
    std::vector<std::pair<std::size_t, int>> objective;  // observable id -> value 1/0
};

/// A finite support of psi: specimens partitioned into measurement contexts, with
/// measured outcomes and a partial map of objective values.
class Population {
public:
    std::size_t size() const { return context_of_.size(); }
    std::size_t observable_count() const { return observables_.size(); }
    bool measured() const { return measured_; }
    std::optional<std::uint64_t> seed() const { return seed_; }

    const StateVector& psi() const { return psi_; }
    const std::vector<ObservableSpec>& observables() const { return observables_; }
    const std::vector<MeasurementContext>& contexts() const { return contexts_; }
    const std::vector<std::size_t>& allocation() const { return allocation_; }

    /// Throws std::out_of_range for an unknown name.
    std::size_t observable_id(const std::string& name) const;

    std::size_t context_of(std::size_t specimen) const { return context_of_.at(specimen); }
    /// Specimens allocated to context `c`.
    SpecimenSet context_set(std::size_t c) const;

    std::optional<int> measured_outcome(std::size_t specimen, std::size_t observable) const;
    std::optional<int> objective_value(std::size_t specimen, std::size_t observable) const;

    /// Records an objective value (1/0). Throws std::logic_error if the specimen
    /// already holds the opposite value.
    void assign_objective(std::size_t specimen, std::size_t observable, int value);

    Specimen specimen(std::size_t id) const;

    nlohmann::json to_json() const;

private:
    friend Population build_population(StateVector, std::vector<ObservableSpec>, std::vector<MeasurementContext>,
                                       std::vector<std::size_t>, std::size_t, double);
    friend Population measure_all(const Population&, std::uint64_t, std::size_t);

    std::size_t cell(std::size_t specimen, std::size_t observable) const {
        return specimen * observables_.size() + observable;
    }

    static constexpr std::int8_t kNone = -1;

    StateVector psi_;
    std::vector<ObservableSpec> observables_;
    std::vector<MeasurementContext> contexts_;
    std::vector<std::size_t> allocation_;
    std::vector<std::uint32_t> context_of_;
    std::vector<std::int8_t> measured_cells_;
    std::vector<std::int8_t> objective_cells_;
    bool measured_ = false;
    std::optional<std::uint64_t> seed_;
};

/// Creates `total` unmeasured specimens, allocation[c] of them in context c, ids
/// assigned in context order. Throws std::invalid_argument if the allocation does not
/// sum to `total`, a context member is out of range or carries a different projection
/// than its observable, or two separated observables fail to commute.
Population build_population(StateVector psi, std::vector<ObservableSpec> observables,
                            std::vector<MeasurementContext> contexts, std::vector<std::size_t> allocation,
                            std::size_t total, double tol = kTolAlg);

/// Samples every specimen's context with its own stream RngStream(seed, id) and
/// copies outcomes into the objective map. The result does not depend on `shards`.
/// Throws std::logic_error on an already measured population.
Population measure_all(const Population& pop, std::uint64_t seed, std::size_t shards = 1);

SpecimenSet set_query(const Population& pop, std::size_t observable, SetKind kind);
SpecimenSet set_query(const Population& pop, const std::string& observable, SetKind kind);

/// Mean of a(x) b(x) over `sample` using +-1 objective values. Throws
/// std::invalid_argument for an empty sample and std::domain_error when a specimen
/// lacks a value.
double mean_product(const Population& pop, std::size_t a, std::size_t b, const SpecimenSet& sample);

}  // namespace nonloc
