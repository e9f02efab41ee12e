#include "roving/model.hpp"

#include "roving/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstring>
#include <numeric>
#include <string>
#include <type_traits>

namespace roving {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kSingularThreshold = 1e-12;

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::NegativeParameter, std::string(what) + " must be positive, got " + std::to_string(v));
    }
}

/// x (x+1) ... (x+k-1)
double rising(double x, int k)
{
    double p = 1.0;
    for (int j = 0; j < k; ++j) p *= x + j;
    return p;
}

Eigen::MatrixXd transfer_matrix(const NetworkModel& model)
{
    const auto n = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(j, i) -= model.route(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    return a;
}

}  // namespace

void check_distribution(const DistributionSpec& dist)
{
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                if (!(d.value >= 0.0) || !std::isfinite(d.value)) {
                    throw Error(ErrorCode::NegativeParameter, "deterministic value must be >= 0");
                }
            } else if constexpr (std::is_same_v<T, Exponential>) {
                require_positive(d.rate, "exponential rate");
            } else if constexpr (std::is_same_v<T, Erlang>) {
                if (d.phases < 1) throw Error(ErrorCode::NegativeParameter, "erlang phases must be >= 1");
                require_positive(d.rate, "erlang rate");
            } else if constexpr (std::is_same_v<T, HyperExponential>) {
                if (d.weights.empty() || d.weights.size() != d.rates.size()) {
                    throw Error(ErrorCode::InvalidConfig, "hyperexponential needs matching non-empty weights and rates");
                }
                for (double w : d.weights) {
                    if (!(w >= 0.0)) throw Error(ErrorCode::NegativeParameter, "hyperexponential weight < 0");
                }
                for (double r : d.rates) require_positive(r, "hyperexponential rate");
                const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
                if (std::abs(total - 1.0) > kRowTolerance) {
                    throw Error(ErrorCode::InvalidConfig, "hyperexponential weights sum to " + std::to_string(total));
                }
            } else {
                require_positive(d.shape, "gamma shape");
                require_positive(d.rate, "gamma rate");
            }
        },
        dist);
}

double moment(const DistributionSpec& dist, int k)
{
    return std::visit(
        [k](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return std::pow(d.value, k);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return rising(1.0, k) / std::pow(d.rate, k);
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return rising(d.phases, k) / std::pow(d.rate, k);
            } else if constexpr (std::is_same_v<T, HyperExponential>) {
                double m = 0.0;
                for (std::size_t j = 0; j < d.weights.size(); ++j) m += d.weights[j] * rising(1.0, k) / std::pow(d.rates[j], k);
                return m;
            } else {
                return rising(d.shape, k) / std::pow(d.rate, k);
            }
        },
        dist);
}

NetworkModel validate(NetworkSpec raw)
{
    const std::size_t n = raw.queues.size();
    if (n == 0) throw Error(ErrorCode::InvalidConfig, "network needs at least one queue");
    if (raw.routing.size() != n) {
        throw Error(ErrorCode::InvalidConfig, "routing has " + std::to_string(raw.routing.size()) + " rows for " +
                                                  std::to_string(n) + " queues");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& q = raw.queues[i];
        if (!(q.arrival_rate >= 0.0) || !std::isfinite(q.arrival_rate)) {
            throw Error(ErrorCode::NegativeParameter, "arrival rate of queue " + std::to_string(i + 1) + " < 0");
        }
        check_distribution(q.service);
        check_distribution(q.switchover);

        const auto& row = raw.routing[i];
        if (row.size() != n + 1) {
            throw Error(ErrorCode::InvalidConfig, "routing row " + std::to_string(i + 1) + " needs " +
                                                      std::to_string(n + 1) + " entries");
        }
        for (double p : row) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw Error(ErrorCode::NegativeParameter, "routing entry outside [0,1] in row " + std::to_string(i + 1));
            }
        }
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        if (std::abs(total - 1.0) > kRowTolerance) {
            throw Error(ErrorCode::RowSumError, "routing row " + std::to_string(i + 1) + " sums to " + std::to_string(total));
        }
    }

    NetworkModel model(std::move(raw));
    bool leaves = false;
    for (std::size_t i = 0; i < n; ++i) leaves = leaves || model.exit_probability(i) > 0.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(transfer_matrix(model));
    lu.setThreshold(kSingularThreshold);
    if (!leaves || !lu.isInvertible()) {
        throw Error(ErrorCode::SingularRouting, "I - P^T is singular: some customers never leave the network");
    }
    return model;
}

TrafficSolution solve_traffic(const NetworkModel& model)
{
    const std::size_t n = model.size();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(transfer_matrix(model));
    lu.setThreshold(kSingularThreshold);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularRouting, "I - P^T is singular");

    Eigen::VectorXd lambda(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) lambda(static_cast<Eigen::Index>(i)) = model.lambda(i);
    const Eigen::VectorXd gamma = lu.solve(lambda);

    TrafficSolution t;
    t.gamma.resize(n);
    t.rho_i.resize(n);
    double variance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Clamp round-off so that gamma_i >= lambda_i holds exactly.
        t.gamma[i] = std::max(gamma(static_cast<Eigen::Index>(i)), model.lambda(i));
        t.rho_i[i] = t.gamma[i] * mean(model.queue(i).service);
        t.rho += t.rho_i[i];
        const double r1 = mean(model.queue(i).switchover);
        t.r += r1;
        variance += moment(model.queue(i).switchover, 2) - r1 * r1;
    }
    t.r2 = variance + t.r * t.r;
    t.mean_cycle = t.rho < 1.0 ? t.r / (1.0 - t.rho) : std::numeric_limits<double>::infinity();
    return t;
}

NetworkSpec scale_to_load(NetworkSpec raw, double rho)
{
    if (!(rho >= 0.0)) throw Error(ErrorCode::NegativeParameter, "target load must be >= 0");
    const NetworkModel model = validate(raw);
    const double current = solve_traffic(model).rho;
    if (!(current > 0.0)) throw Error(ErrorCode::NoExternalArrivals, "cannot scale a network without load to rho");
    const double factor = rho / current;
    for (auto& q : raw.queues) q.arrival_rate *= factor;
    return raw;
}

namespace {

class Fnv1a {
public:
    void add(const void* data, std::size_t len)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= p[i];
            h_ *= 1099511628211ULL;
        }
    }
    void add(double v)
    {
        if (v == 0.0) v = 0.0;  // fold -0.0
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        add(&bits, sizeof bits);
    }
    void add(std::uint64_t v) { add(&v, sizeof v); }
    [[nodiscard]] std::uint64_t value() const noexcept { return h_; }

private:
    std::uint64_t h_ = 14695981039346656037ULL;
};

void hash_distribution(Fnv1a& h, const DistributionSpec& dist)
{
    h.add(static_cast<std::uint64_t>(dist.index()));
    std::visit(
        [&h](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                h.add(d.value);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                h.add(d.rate);
            } else if constexpr (std::is_same_v<T, Erlang>) {
                h.add(static_cast<std::uint64_t>(d.phases));
                h.add(d.rate);
            } else if constexpr (std::is_same_v<T, HyperExponential>) {
                h.add(static_cast<std::uint64_t>(d.weights.size()));
                for (double w : d.weights) h.add(w);
                for (double r : d.rates) h.add(r);
            } else {
                h.add(d.shape);
                h.add(d.rate);
            }
        },
        dist);
}

}  // namespace

std::uint64_t model_hash(const NetworkModel& model)
{
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(model.size()));
    for (const auto& q : model.queues()) {
        h.add(q.arrival_rate);
        hash_distribution(h, q.service);
        hash_distribution(h, q.switchover);
        h.add(static_cast<std::uint64_t>(q.discipline));
    }
    for (const auto& row : model.spec().routing) {
        for (double p : row) h.add(p);
    }
    return h.value();
}

}  // namespace roving
