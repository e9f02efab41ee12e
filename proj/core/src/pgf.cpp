#include "roving/pgf.hpp"

#include "roving/error.hpp"
#include "roving/kernels.hpp"
#include "roving/transforms.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace roving {

namespace {

int order_of(const ArgVector& z)
{
    int order = Jet::kMaxOrder;
    for (const Jet& e : z) order = std::min(order, e.order());
    return order;
}

void require_stable(const TrafficSolution& traffic)
{
    if (!traffic.stable()) throw Error(ErrorCode::UnstableSystem, "rho = " + std::to_string(traffic.rho) + " >= 1");
}

/// Arrival term during a service at queue i as seen by the service boundary relations.
Jet service_sigma(const NetworkModel& model, std::size_t i, const ArgVector& z)
{
    return model.exhaustive(i) ? sigma(model, z) : sigma_i(model, i, z);
}

/// Argument substitution across the visit to queue i (end of V_i -> beginning of V_i).
ArgVector visit_end_argument(const NetworkModel& model, std::size_t i, ArgVector z, const Jet& marker,
                             const SolverOptions& options)
{
    const QueueSpec& q = model.queue(i);
    if (model.exhaustive(i)) {
        z[i] = busy_period(q.service, q.arrival_rate, model.route(i, i), p_exh_i(model, i, z),
                           sigma_i(model, i, z) + marker, options);
        z[gate_position(z)] = Jet(z[i].order(), 1.0);
    } else {
        z[i] = lst(q.service, sigma_i(model, i, z) + marker) * p_i(model, i, z);
    }
    return z;
}

/// Gate removal at the end of a gated visit: customers behind the gate become ordinary.
ArgVector switch_begin_argument(const NetworkModel& model, std::size_t i, ArgVector z)
{
    if (!model.exhaustive(i)) z[gate_position(z)] = z[i];
    return z;
}

}  // namespace

Jet sigma(const NetworkModel& model, const ArgVector& z)
{
    Jet s(order_of(z), 0.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
        if (model.lambda(j) != 0.0) s += model.lambda(j) * (1.0 - z[j]);
    }
    return s;
}

Jet sigma_i(const NetworkModel& model, std::size_t i, const ArgVector& z)
{
    Jet s(order_of(z), 0.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
        if (j != i && model.lambda(j) != 0.0) s += model.lambda(j) * (1.0 - z[j]);
    }
    if (!model.exhaustive(i) && model.lambda(i) != 0.0) s += model.lambda(i) * (1.0 - z[gate_position(z)]);
    return s;
}

// Both routing PGFs are written as 1 - sum p_ij (1 - z_j) so that they equal
// one exactly at z = 1 even when a routing row sums to one only up to rounding.
Jet p_i(const NetworkModel& model, std::size_t i, const ArgVector& z)
{
    Jet p(order_of(z), 1.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double pij = model.route(i, j);
        if (pij == 0.0) continue;
        const bool behind_gate = j == i && !model.exhaustive(i);
        p -= pij * (1.0 - z[behind_gate ? gate_position(z) : j]);
    }
    return p;
}

Jet p_exh_i(const NetworkModel& model, std::size_t i, const ArgVector& z)
{
    const Real scale = 1.0L / (1.0L - model.route(i, i));
    Jet p(order_of(z), 1.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
        if (j != i && model.route(i, j) != 0.0) p -= (model.route(i, j) * scale) * (1.0 - z[j]);
    }
    return p;
}

CycleStep cycle_map(const NetworkModel& model, std::size_t i, const ArgVector& z, const SolverOptions& options)
{
    return cycle_map(model, i, z, Jet(order_of(z), 0.0), options);
}

CycleStep cycle_map(const NetworkModel& model, std::size_t i, const ArgVector& z, const Jet& marker,
                    const SolverOptions& options)
{
    const std::size_t n = model.size();
    CycleStep step{z, Jet(order_of(z), 1.0)};
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t j = model.back(i, k);
        // beginning of V_{j+1} = end of R_j
        step.factor *= lst(model.queue(j).switchover, sigma(model, step.z) + marker);
        // beginning of R_j = end of V_j with the gate lifted
        ArgVector w = switch_begin_argument(model, j, std::move(step.z));
        step.z = visit_end_argument(model, j, std::move(w), marker, options);
    }
    return step;
}

BoundaryPGFValue lb_visit(const NetworkModel& model, std::size_t i, const ArgVector& z, const SolverOptions& options)
{
    require_stable(solve_traffic(model));
    const std::size_t n = model.size();
    ArgVector arg = z;
    Jet value(order_of(z), 1.0);
    for (long cycle = 0; cycle < options.max_cycles; ++cycle) {
        CycleStep step = cycle_map(model, i, arg, options);
        value *= step.factor;
        double distance = step.factor.distance_to_constant(1.0);
        double moved = 0.0;
        // The gate entry is irrelevant at a visit beginning: nobody waits behind a gate then.
        for (std::size_t j = 0; j < n; ++j) {
            distance = std::max(distance, step.z[j].distance_to_constant(1.0));
            moved = std::max(moved, step.z[j].distance(arg[j]));
        }
        arg = std::move(step.z);
        if (distance <= options.cycle_tolerance) return {value, {Boundary::Kind::VisitBegin, i}};
        // Rounding can park the argument a few ulps short of one. Further cycles would only
        // multiply in rounding residue, so a stalled argument ends the product.
        if (moved == 0.0) return {value, {Boundary::Kind::VisitBegin, i}};
    }
    throw Error(ErrorCode::NoConvergence, "visit-beginning PGF did not converge within the cycle cap");
}

BoundaryPGFValue boundary_pgf(const NetworkModel& model, const TrafficSolution& traffic, Boundary boundary,
                              const ArgVector& z, const SolverOptions& options)
{
    require_stable(traffic);
    const std::size_t i = boundary.queue;
    const Jet none(order_of(z), 0.0);
    switch (boundary.kind) {
    case Boundary::Kind::VisitBegin:
        return lb_visit(model, i, z, options);
    case Boundary::Kind::VisitEnd:
        return {lb_visit(model, i, visit_end_argument(model, i, z, none, options), options).value, boundary};
    case Boundary::Kind::SwitchBegin: {
        const ArgVector w = visit_end_argument(model, i, switch_begin_argument(model, i, z), none, options);
        return {lb_visit(model, i, w, options).value, boundary};
    }
    case Boundary::Kind::SwitchEnd: {
        const Jet begin = boundary_pgf(model, traffic, {Boundary::Kind::SwitchBegin, i}, z, options).value;
        return {begin * lst(model.queue(i).switchover, sigma(model, z)), boundary};
    }
    case Boundary::Kind::ServiceBegin:
        return lb_service(model, traffic, i, z, options);
    case Boundary::Kind::ServiceEnd:
        return lc_service(model, traffic, i, z, options);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown boundary");
}

namespace {

/// Service-beginning relation at z as a jet quotient; `degenerate` is set when
/// numerator and denominator both vanish to working order.
Jet service_begin_quotient(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i,
                           const ArgVector& z, const SolverOptions& options, bool& degenerate)
{
    const double visits = traffic.gamma[i] * traffic.mean_cycle;
    const Jet begin = boundary_pgf(model, traffic, {Boundary::Kind::VisitBegin, i}, z, options).value;
    const Jet end = boundary_pgf(model, traffic, {Boundary::Kind::VisitEnd, i}, z, options).value;
    const Jet ratio = lst(model.queue(i).service, service_sigma(model, i, z)) * p_i(model, i, z) / z[i];
    const Jet den = visits * (1.0 - ratio);
    degenerate = den.order() > 0 && den.leading_zeros(options.removable_tolerance) > den.order();
    if (degenerate) return den;
    return jet_div(begin - end, den, options.removable_tolerance);
}

/// Along paths where nothing done at queue i touches the varying coordinates the
/// relation reads 0/0 for every x. Tilting z_i by kappa*x makes it regular; the
/// coefficient of x^k is then a polynomial of degree <= k in kappa, so Lagrange
/// interpolation back to kappa = 0 is exact.
Jet tilted_service_begin(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i,
                         const ArgVector& z, const SolverOptions& options)
{
    const int order = order_of(z);
    const Jet x = Jet::variable(0.0, order);
    std::vector<double> nodes;
    std::vector<Jet> values;
    int result_order = order;
    for (int r = 0; static_cast<int>(values.size()) <= result_order; ++r) {
        const double kappa = (r % 2 == 0 ? 1.0 : -1.0) * (r / 2 + 1);
        ArgVector w = z;
        w[i] -= kappa * x;
        bool degenerate = false;
        Jet v = service_begin_quotient(model, traffic, i, w, options, degenerate);
        if (degenerate) throw Error(ErrorCode::PoleDetected, "service-beginning relation is degenerate in every direction");
        result_order = std::min(result_order, v.order());
        nodes.push_back(kappa);
        values.push_back(std::move(v));
    }
    const std::size_t used = static_cast<std::size_t>(result_order) + 1;
    Jet out(result_order, 0.0);
    for (std::size_t k = 0; k < used; ++k) {
        double weight = 1.0;
        for (std::size_t l = 0; l < used; ++l) {
            if (l != k) weight *= -nodes[l] / (nodes[k] - nodes[l]);
        }
        for (int c = 0; c <= result_order; ++c) out[c] += weight * values[k][c];
    }
    return out;
}

}  // namespace

BoundaryPGFValue lb_service(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i,
                            const ArgVector& z, const SolverOptions& options)
{
    require_stable(traffic);
    if (!(traffic.gamma[i] * traffic.mean_cycle > 0.0)) {
        throw Error(ErrorCode::DeadQueue, "queue " + std::to_string(i + 1) + " never serves a customer");
    }
    bool degenerate = false;
    Jet value = service_begin_quotient(model, traffic, i, z, options, degenerate);
    if (degenerate) value = tilted_service_begin(model, traffic, i, z, options);
    return {std::move(value), {Boundary::Kind::ServiceBegin, i}};
}

BoundaryPGFValue lc_service(const NetworkModel& model, const TrafficSolution& traffic, std::size_t i,
                            const ArgVector& z, const SolverOptions& options)
{
    const Jet begin = lb_service(model, traffic, i, z, options).value;
    return {begin * lst(model.queue(i).service, service_sigma(model, i, z)) / z[i], {Boundary::Kind::ServiceEnd, i}};
}

Jet period_pgf(const NetworkModel& model, const TrafficSolution& traffic, Period period, const ArgVector& z,
               const Jet& omega, const SolverOptions& options)
{
    const std::size_t j = period.queue;
    const QueueSpec& q = model.queue(j);
    if (period.kind == Period::Kind::Visit) {
        const Jet begin = lb_service(model, traffic, j, z, options).value;
        return begin * past_residual(q.service, service_sigma(model, j, z), omega);
    }
    const Jet begin = boundary_pgf(model, traffic, {Boundary::Kind::SwitchBegin, j}, z, options).value;
    return begin * past_residual(q.switchover, sigma(model, z), omega);
}

Jet arbitrary_epoch_pgf(const NetworkModel& model, const TrafficSolution& traffic, const ArgVector& z,
                        const SolverOptions& options)
{
    require_stable(traffic);
    const int order = order_of(z);
    const Jet zero(order, 0.0);
    Jet total(order, 0.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double visit_weight = traffic.rho_i[j];
        const double switch_weight = mean(model.queue(j).switchover) / traffic.mean_cycle;
        if (visit_weight > 0.0) {
            // During a gated visit the customers behind the gate still belong to queue j.
            ArgVector w = z;
            if (!model.exhaustive(j)) w[gate_position(w)] = w[j];
            total += visit_weight * period_pgf(model, traffic, {Period::Kind::Visit, j}, w, zero, options);
        }
        if (switch_weight > 0.0) {
            total += switch_weight * period_pgf(model, traffic, {Period::Kind::Switch, j}, z, zero, options);
        }
    }
    return total;
}

}  // namespace roving
