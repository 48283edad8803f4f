#include "nonloc/population.hpp"

#include <numeric>
#include <stdexcept>
#include <thread>

namespace nonloc {

std::vector<std::size_t> ids_of(const SpecimenSet& set) {
    std::vector<std::size_t> ids;
    ids.reserve(set.count());
    for (auto i = set.find_first(); i != SpecimenSet::npos; i = set.find_next(i)) ids.push_back(i);
    return ids;
}

std::size_t Population::observable_id(const std::string& name) const {
    for (std::size_t i = 0; i < observables_.size(); ++i)
        if (observables_[i].name == name) return i;
    throw std::out_of_range("unknown observable '" + name + "'");
}

SpecimenSet Population::context_set(std::size_t c) const {
    SpecimenSet set(size());
    for (std::size_t x = 0; x < size(); ++x)
        if (context_of_[x] == c) set.set(x);
    return set;
}

std::optional<int> Population::measured_outcome(std::size_t specimen, std::size_t observable) const {
    const auto v = measured_cells_.at(cell(specimen, observable));
    if (v == kNone) return std::nullopt;
    return v;
}

std::optional<int> Population::objective_value(std::size_t specimen, std::size_t observable) const {
    const auto v = objective_cells_.at(cell(specimen, observable));
    if (v == kNone) return std::nullopt;
    return v;
}

void Population::assign_objective(std::size_t specimen, std::size_t observable, int value) {
    if (value != 0 && value != 1) throw std::invalid_argument("objective value must be 0 or 1");
    auto& slot = objective_cells_.at(cell(specimen, observable));
    if (slot != kNone && slot != value)
        throw std::logic_error("conflicting objective value for specimen " + std::to_string(specimen) + ", " +
                               observables_[observable].name);
    slot = static_cast<std::int8_t>(value);
}

Specimen Population::specimen(std::size_t id) const {
    Specimen s;
    s.id = id;
    s.context = context_of_.at(id);
    for (std::size_t o = 0; o < observables_.size(); ++o) {
        if (auto m = measured_outcome(id, o)) s.measured.emplace_back(o, *m);
        if (auto v = objective_value(id, o)) s.objective.emplace_back(o, *v);
    }
    return s;
}

nlohmann::json Population::to_json() const {
    using nlohmann::json;
    json doc;
    doc["schema_version"] = 1;
    doc["run"] = {{"measured", measured_}, {"seed", seed_ ? json(*seed_) : json(nullptr)}, {"dim", psi_.dim()},
                  {"specimens", size()}};
    json obs = json::array();
    for (const auto& o : observables_) obs.push_back({{"name", o.name}, {"region", o.region}});
    doc["observables"] = obs;
    json ctx = json::array();
    for (std::size_t c = 0; c < contexts_.size(); ++c) {
        json members = json::array();
        for (auto id : contexts_[c].observable_ids()) members.push_back(observables_[id].name);
        ctx.push_back({{"name", contexts_[c].name()}, {"observables", members}, {"count", allocation_[c]}});
    }
    doc["contexts"] = ctx;
    json records = json::array();
    for (std::size_t x = 0; x < size(); ++x) {
        json m = json::object(), v = json::object();
        for (std::size_t o = 0; o < observables_.size(); ++o) {
            if (auto r = measured_outcome(x, o)) m[observables_[o].name] = *r;
            if (auto r = objective_value(x, o)) v[observables_[o].name] = *r;
        }
        records.push_back({{"id", x}, {"context", contexts_[context_of_[x]].name()}, {"measured", m}, {"objective", v}});
    }
    doc["specimens"] = records;
    return doc;
}

Population build_population(StateVector psi, std::vector<ObservableSpec> observables,
                            std::vector<MeasurementContext> contexts, std::vector<std::size_t> allocation,
                            std::size_t total, double tol) {
    if (!psi.is_normalized(tol)) throw std::invalid_argument("state is not normalised");
    if (allocation.size() != contexts.size())
        throw std::invalid_argument("allocation must give one count per context");
    if (std::accumulate(allocation.begin(), allocation.end(), std::size_t{0}) != total)
        throw std::invalid_argument("allocation counts do not sum to the population size");
    for (std::size_t i = 0; i < observables.size(); ++i) {
        const auto& o = observables[i];
        if (o.projection.dim() != psi.dim())
            throw std::invalid_argument("observable '" + o.name + "' has the wrong dimension");
        if (!is_projection(o.projection, tol))
            throw std::invalid_argument("observable '" + o.name + "' is not a projection");
        for (std::size_t j = 0; j < i; ++j) {
            if (observables[j].name == o.name) throw std::invalid_argument("duplicate observable '" + o.name + "'");
            if (separated(o, observables[j]) && !commutes(o.projection, observables[j].projection, tol))
                throw std::invalid_argument("separated observables '" + observables[j].name + "' and '" + o.name +
                                            "' do not commute");
        }
    }
    for (const auto& ctx : contexts) {
        for (std::size_t k = 0; k < ctx.size(); ++k) {
            const auto id = ctx.observable_ids()[k];
            if (id >= observables.size())
                throw std::invalid_argument("context '" + ctx.name() + "' references an unknown observable");
            if ((ctx.projections()[k] - observables[id].projection).max_abs() > tol)
                throw std::invalid_argument("context '" + ctx.name() + "' projection differs from observable '" +
                                            observables[id].name + "'");
        }
    }

    Population pop;
    pop.psi_ = std::move(psi);
    pop.observables_ = std::move(observables);
    pop.contexts_ = std::move(contexts);
    pop.allocation_ = std::move(allocation);
    pop.context_of_.reserve(total);
    for (std::size_t c = 0; c < pop.allocation_.size(); ++c)
        pop.context_of_.insert(pop.context_of_.end(), pop.allocation_[c], static_cast<std::uint32_t>(c));
    pop.measured_cells_.assign(total * pop.observables_.size(), Population::kNone);
    pop.objective_cells_ = pop.measured_cells_;
    return pop;
}

Population measure_all(const Population& pop, std::uint64_t seed, std::size_t shards) {
    if (pop.measured_) throw std::logic_error("population has already been measured");
    Population out = pop;
    std::vector<OutcomeDistribution> dists;
    dists.reserve(pop.contexts_.size());
    for (const auto& ctx : pop.contexts_) dists.emplace_back(pop.psi_, ctx);

    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t x = begin; x < end; ++x) {
            const auto c = out.context_of_[x];
            RngStream stream(seed, x);
            const std::uint32_t t = dists[c].draw(stream);
            const auto ids = out.contexts_[c].observable_ids();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const auto v = static_cast<std::int8_t>((t >> i) & 1u);
                out.measured_cells_[out.cell(x, ids[i])] = v;
                out.objective_cells_[out.cell(x, ids[i])] = v;
            }
        }
    };

    const std::size_t n = out.size();
    shards = std::max<std::size_t>(1, std::min(shards, n == 0 ? 1 : n));
    if (shards == 1) {
        run(0, n);
    } else {
        std::vector<std::thread> workers;
        for (std::size_t s = 0; s < shards; ++s) workers.emplace_back(run, s * n / shards, (s + 1) * n / shards);
        for (auto& w : workers) w.join();
    }
    out.measured_ = true;
    out.seed_ = seed;
    return out;
}

SpecimenSet set_query(const Population& pop, std::size_t observable, SetKind kind) {
    if (observable >= pop.observable_count()) throw std::out_of_range("unknown observable id");
    SpecimenSet set(pop.size());
    for (std::size_t x = 0; x < pop.size(); ++x) {
        std::optional<int> v;
        int want = -1;
        switch (kind) {
            case SetKind::Measured: v = pop.measured_outcome(x, observable); break;
            case SetKind::Measured1: v = pop.measured_outcome(x, observable); want = 1; break;
            case SetKind::Measured0: v = pop.measured_outcome(x, observable); want = 0; break;
            case SetKind::Objective1: v = pop.objective_value(x, observable); want = 1; break;
            case SetKind::Objective0: v = pop.objective_value(x, observable); want = 0; break;
        }
        if (v && (want < 0 || *v == want)) set.set(x);
    }
    return set;
}

SpecimenSet set_query(const Population& pop, const std::string& observable, SetKind kind) {
    return set_query(pop, pop.observable_id(observable), kind);
}

double mean_product(const Population& pop, std::size_t a, std::size_t b, const SpecimenSet& sample) {
    if (sample.size() != pop.size()) throw std::invalid_argument("sample does not belong to this population");
    if (sample.none()) throw std::invalid_argument("mean_product over an empty sample");
    long long acc = 0;
    for (auto x = sample.find_first(); x != SpecimenSet::npos; x = sample.find_next(x)) {
        const auto va = pop.objective_value(x, a);
        const auto vb = pop.objective_value(x, b);
        if (!va || !vb)
            throw std::domain_error("specimen " + std::to_string(x) + " has no objective value for " +
                                    pop.observables()[va ? b : a].name);
        acc += to_pm(*va) * to_pm(*vb);
    }
    return static_cast<double>(acc) / static_cast<double>(sample.count());
}

}  // namespace nonloc
