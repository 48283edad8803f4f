#include "nonloc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nonloc {

namespace {

// Tuple probabilities below this are rounding residue of exact zeros.
constexpr double kNumericalZero = 1e-15;

StateVector apply_event(const Event& e, const StateVector& v) {
    StateVector pv = *e.projection * v;
    if (e.outcome == 1) return pv;
    return v - pv;
}

}  // namespace

double joint_probability(const StateVector& psi, std::span<const Event> events, double tol) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].projection == nullptr) throw std::invalid_argument("joint_probability: null projection");
        if (events[i].outcome != 0 && events[i].outcome != 1)
            throw std::invalid_argument("joint_probability: outcome must be 0 or 1");
        for (std::size_t j = 0; j < i; ++j)
            if (!commutes(*events[i].projection, *events[j].projection, tol))
                throw std::invalid_argument("joint_probability: events do not commute");
    }
    StateVector v = psi;
    for (const auto& e : events) v = apply_event(e, v);
    return std::clamp(v.squared_norm(), 0.0, 1.0);
}

double expectation_pm(const StateVector& psi, const Operator& p, const Operator& q, double tol) {
    if (!commutes(p, q, tol)) throw std::invalid_argument("expectation_pm: projections do not commute");
    const std::size_t n = psi.dim();
    const Operator id = Operator::identity(n);
    const Operator sp = 2.0 * p - id;
    const Operator sq = 2.0 * q - id;
    const double value = inner(psi, sp * (sq * psi)).real();
    return std::clamp(value, -1.0, 1.0);
}

MeasurementContext::MeasurementContext(std::string name, std::vector<std::size_t> observable_ids,
                                       std::vector<Operator> projections, double tol)
    : name_(std::move(name)), ids_(std::move(observable_ids)), projections_(std::move(projections)) {
    if (ids_.size() != projections_.size())
        throw std::invalid_argument("context '" + name_ + "': id/projection count mismatch");
    if (ids_.empty()) throw std::invalid_argument("context '" + name_ + "' is empty");
    for (std::size_t i = 0; i < projections_.size(); ++i) {
        if (!is_projection(projections_[i], tol))
            throw std::invalid_argument("context '" + name_ + "': member is not a projection");
        for (std::size_t j = 0; j < i; ++j) {
            if (ids_[i] == ids_[j]) throw std::invalid_argument("context '" + name_ + "': duplicate member");
            if (!commutes(projections_[i], projections_[j], tol))
                throw std::invalid_argument("context '" + name_ + "': members do not commute");
        }
    }
}

bool MeasurementContext::contains(std::size_t observable_id) const {
    return std::find(ids_.begin(), ids_.end(), observable_id) != ids_.end();
}

OutcomeDistribution::OutcomeDistribution(const StateVector& psi, const MeasurementContext& context, double tol)
    : members_(context.size()) {
    const std::size_t tuples = std::size_t{1} << members_;
    probabilities_.resize(tuples);
    cumulative_.resize(tuples);
    std::vector<Event> events(members_);
    double total = 0.0;
    for (std::size_t t = 0; t < tuples; ++t) {
        for (std::size_t i = 0; i < members_; ++i) events[i] = {&context.projections()[i], int((t >> i) & 1u)};
        double p = joint_probability(psi, events, tol);
        if (p < kNumericalZero) p = 0.0;
        probabilities_[t] = p;
        total += p;
    }
    if (std::abs(total - 1.0) > tol) throw std::logic_error("outcome distribution does not sum to 1");
    double acc = 0.0;
    for (std::size_t t = 0; t < tuples; ++t) {
        acc += probabilities_[t] / total;
        cumulative_[t] = acc;
    }
}

std::uint32_t OutcomeDistribution::draw(RngStream& stream) const {
    const double u = stream.next_uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        // u beyond the rounded total: take the last tuple with nonzero mass
        std::size_t t = cumulative_.size();
        while (t > 0 && probabilities_[t - 1] == 0.0) --t;
        return static_cast<std::uint32_t>(t - 1);
    }
    return static_cast<std::uint32_t>(it - cumulative_.begin());
}

std::vector<int> sample(const StateVector& psi, const MeasurementContext& context, RngStream& stream) {
    const OutcomeDistribution dist(psi, context);
    const std::uint32_t t = dist.draw(stream);
    std::vector<int> out(context.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = int((t >> i) & 1u);
    return out;
}

}  // namespace nonloc
