#include "roving/kernels.hpp"

#include "roving/error.hpp"
#include "roving/transforms.hpp"

#include <string>

namespace roving {

Jet busy_period(const DistributionSpec& service, double lambda, double p_self, const Jet& z, const Jet& omega,
                const SolverOptions& options)
{
    const double own_load = lambda * mean(service) / (1.0 - p_self);
    if (!(own_load < 1.0)) {
        throw Error(ErrorCode::NoConvergence, "busy period diverges: lambda E[B] / (1 - p) = " + std::to_string(own_load));
    }
    const int order = std::min(z.order(), omega.order());
    Jet x(order, 1.0);
    for (long it = 0; it < options.busy_max_iterations; ++it) {
        Jet next = z * lst_geometric(service, p_self, omega + lambda * (1.0 - x));
        const double step = next.distance(x);
        x = next;
        if (step <= options.busy_tolerance) return x;
    }
    throw Error(ErrorCode::NoConvergence, "busy-period iteration cap reached");
}

KernelTable kernel_table(const NetworkModel& model, const TrafficSolution& traffic, std::size_t target,
                         const Jet& omega, const SolverOptions& options)
{
    if (!traffic.stable()) throw Error(ErrorCode::UnstableSystem, "rho = " + std::to_string(traffic.rho) + " >= 1");
    const std::size_t n = model.size();
    const int order = omega.order();

    KernelTable t;
    t.target = target;
    t.omega = omega;
    t.btilde.reserve(n + 1);
    t.ptilde.reserve(n + 1);
    t.rtilde.reserve(n);
    t.load.reserve(n + 1);

    Jet load = omega;
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t source = model.back(target, k);
        const QueueSpec& q = model.queue(source);
        // Routing weights are renormalised over non-self moves for an exhaustive source.
        const Real scale = model.exhaustive(source) ? 1.0L / (1.0L - model.route(source, source)) : 1.0L;
        Jet p(order, 1.0);
        for (std::size_t j = 0; j < k; ++j) {
            p -= (scale * model.route(source, model.back(target, j))) * (1.0 - t.btilde[j]);
        }
        if (model.exhaustive(source)) {
            t.btilde.push_back(
                busy_period(q.service, q.arrival_rate, model.route(source, source), p, load, options));
        } else {
            t.btilde.push_back(lst(q.service, load) * p);
        }
        t.ptilde.push_back(p);
        if (k < n) t.rtilde.push_back(lst(q.switchover, load));
        t.load.push_back(load);
        load += model.lambda(source) * (1.0 - t.btilde.back());
    }
    return t;
}

UVectors u_vectors(const NetworkModel& model, const KernelTable& table, const KernelTable& previous)
{
    const std::size_t n = model.size();
    const std::size_t i = table.target;
    const int order = table.omega.order();

    UVectors v;
    v.target = i;
    for (std::size_t k = 0; k < n; ++k) {
        ArgVector u = ones(n, order);
        u[model.back(i, k)] = table.btilde[k];
        v.u.push_back(std::move(u));
    }
    ArgVector un = ones(n, order);
    un[n] = table.btilde[0];
    v.u.push_back(std::move(un));

    v.u_exh0 = ones(n, order);
    v.u_exh0[i] = lst(model.queue(i).service, table.omega);

    const bool exhaustive = model.exhaustive(i);
    ArgVector acc = exhaustive ? v.u_exh0 : v.u[0];
    v.gate.push_back(acc);
    for (std::size_t k = 1; k < n; ++k) {
        acc[model.back(i, k)] *= previous.btilde[k - 1];
        v.gate.push_back(acc);
    }
    if (!exhaustive) {
        ArgVector last = cycle_argument(model, previous);
        last[n] *= table.btilde[0];
        v.gate.push_back(std::move(last));
    }
    return v;
}

ArgVector cycle_argument(const NetworkModel& model, const KernelTable& table)
{
    const std::size_t n = model.size();
    ArgVector z = ones(n, table.omega.order());
    for (std::size_t k = 0; k < n; ++k) z[model.back(table.target, k)] *= table.btilde[k];
    return z;
}

}  // namespace roving
