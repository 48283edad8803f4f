#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nonloc/linalg.hpp"
#include "nonloc/rng.hpp"

namespace nonloc {

/// A 1-0 measurement event: projection P with outcome 1 (P) or 0 (1 - P).
struct Event {
    const Operator* projection = nullptr;
    int outcome = 1;
};

/// ||prod_i E_i psi||^2. Throws std::invalid_argument when two event projections
/// fail to commute or an outcome is not 0/1.
double joint_probability(const StateVector& psi, std::span<const Event> events, double tol = kTolAlg);

/// <psi|(2p - 1)(2q - 1)|psi>, the expectation of the product of the +-1 values.
double expectation_pm(const StateVector& psi, const Operator& p, const Operator& q, double tol = kTolAlg);

/// Outcome 1/0 to the +-1 encoding of value maps.
constexpr int to_pm(int outcome) { return 2 * outcome - 1; }
constexpr int to_outcome(int pm) { return (pm + 1) / 2; }

/// A set of pairwise commuting projections measured together on one specimen.
/// Members are identified by observable ids owned by the caller.
class MeasurementContext {
public:
    MeasurementContext(std::string name, std::vector<std::size_t> observable_ids, std::vector<Operator> projections,
                       double tol = kTolAlg);

    const std::string& name() const { return name_; }
    std::size_t size() const { return ids_.size(); }
    std::span<const std::size_t> observable_ids() const { return ids_; }
    std::span<const Operator> projections() const { return projections_; }
    bool contains(std::size_t observable_id) const;

private:
    std::string name_;
    std::vector<std::size_t> ids_;
    std::vector<Operator> projections_;
};

/// Born distribution over the 2^k outcome tuples of a context. Bit i of a tuple
/// index is the outcome of member i.
class OutcomeDistribution {
public:
    OutcomeDistribution(const StateVector& psi, const MeasurementContext& context, double tol = kTolAlg);

    std::size_t members() const { return members_; }
    std::span<const double> probabilities() const { return probabilities_; }
    double probability(std::uint32_t tuple) const { return probabilities_.at(tuple); }

    /// Inverse-CDF draw from one uniform of `stream`.
    std::uint32_t draw(RngStream& stream) const;

private:
    std::size_t members_;
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
};

/// Outcome of each context member, in context order.
std::vector<int> sample(const StateVector& psi, const MeasurementContext& context, RngStream& stream);

}  // namespace nonloc
