#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/textproc.hpp"

namespace semoverlap {

/// Dense row-major ground-cost matrix.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> costs;

    double operator()(std::size_t i, std::size_t j) const { return costs[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return costs[i * cols + j]; }
};

struct TransportResult {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> flow;
    double objective = 0.0;
    std::size_t iterations = 0;
    /// Only meaningful for approximate solvers.
    bool converged = true;

    double operator()(std::size_t i, std::size_t j) const { return flow[i * cols + j]; }
};

inline double euclidean(std::span<const float> x, std::span<const float> y) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = static_cast<double>(x[k]) - static_cast<double>(y[k]);
        sq += d * d;
    }
    return std::sqrt(sq);
}

inline CostMatrix cost_matrix(const NBow& a, const NBow& b, const EmbeddingTable& table) {
    if (a.empty() || b.empty())
        throw Error(ErrorKind::empty_distribution, "cost matrix needs two non-empty distributions");
    CostMatrix c{a.size(), b.size(), std::vector<double>(a.size() * b.size())};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto xi = table.row(a.support[i]);
        for (std::size_t j = 0; j < b.size(); ++j)
            c(i, j) = a.support[i] == b.support[j] ? 0.0 : euclidean(xi, table.row(b.support[j]));
    }
    return c;
}

namespace detail {

inline void check_marginals(std::span<const double> supply, std::span<const double> demand,
                            const CostMatrix& costs) {
    if (supply.empty() || demand.empty())
        throw Error(ErrorKind::empty_distribution, "transport needs two non-empty distributions");
    if (costs.rows != supply.size() || costs.cols != demand.size())
        throw Error(ErrorKind::input, "cost matrix shape does not match the marginals");
    double sa = 0.0, sb = 0.0;
    for (double w : supply) {
        if (!(w >= 0.0))
            throw Error(ErrorKind::input, "negative or NaN supply weight");
        sa += w;
    }
    for (double w : demand) {
        if (!(w >= 0.0))
            throw Error(ErrorKind::input, "negative or NaN demand weight");
        sb += w;
    }
    if (std::abs(sa - sb) > 1e-9 * std::max(1.0, std::max(sa, sb)))
        throw Error(ErrorKind::input, "marginals carry different total mass");
}

inline double plan_cost(const std::vector<double>& flow, const CostMatrix& costs) {
    double total = 0.0;
    for (std::size_t k = 0; k < flow.size(); ++k)
        total += flow[k] * costs.costs[k];
    return total;
}

} // namespace detail

/// Exact min-cost transportation by successive shortest augmenting paths
/// with node potentials. Every augmentation exhausts a supply, a demand, or
/// a reverse residual edge, so the loop runs O(rows + cols) times in
/// practice; each pass is a dense Dijkstra over the bipartite residual graph.
inline TransportResult solve_exact(std::span<const double> supply_in, std::span<const double> demand_in,
                                   const CostMatrix& costs) {
    detail::check_marginals(supply_in, demand_in, costs);
    const std::size_t m = costs.rows;
    const std::size_t n = costs.cols;
    constexpr double kDust = 1e-15;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    std::vector<double> supply(supply_in.begin(), supply_in.end());
    std::vector<double> demand(demand_in.begin(), demand_in.end());
    TransportResult result{m, n, std::vector<double>(m * n, 0.0), 0.0, 0, true};
    auto& flow = result.flow;

    std::vector<double> pot_src(m, 0.0), pot_dst(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double best = kInf;
        for (std::size_t i = 0; i < m; ++i)
            best = std::min(best, costs(i, j));
        pot_dst[j] = best;
    }

    std::vector<double> dist_src(m), dist_dst(n);
    std::vector<std::size_t> pred_src(m), pred_dst(n);
    std::vector<char> done_src(m), done_dst(n);
    const std::size_t cap = 64 * (m + n) * (m + n) + 1024;

    auto has_supply = [&] { return std::any_of(supply.begin(), supply.end(), [](double s) { return s > kDust; }); };
    auto has_demand = [&] { return std::any_of(demand.begin(), demand.end(), [](double d) { return d > kDust; }); };

    while (has_supply() && has_demand()) {
        if (++result.iterations > cap)
            throw Error(ErrorKind::internal, "exact transport exceeded its augmentation budget");
        for (std::size_t i = 0; i < m; ++i) {
            dist_src[i] = supply[i] > kDust ? 0.0 : kInf;
            pred_src[i] = kNone;
            done_src[i] = 0;
        }
        std::fill(dist_dst.begin(), dist_dst.end(), kInf);
        std::fill(pred_dst.begin(), pred_dst.end(), kNone);
        std::fill(done_dst.begin(), done_dst.end(), 0);

        std::size_t target = kNone;
        for (;;) {
            // Pick the closest unsettled node; sources win ties, then lower index.
            double best = kInf;
            std::size_t node = kNone;
            bool is_src = false;
            for (std::size_t i = 0; i < m; ++i)
                if (!done_src[i] && dist_src[i] < best) {
                    best = dist_src[i];
                    node = i;
                    is_src = true;
                }
            for (std::size_t j = 0; j < n; ++j)
                if (!done_dst[j] && dist_dst[j] < best) {
                    best = dist_dst[j];
                    node = j;
                    is_src = false;
                }
            if (node == kNone)
                break;
            if (is_src) {
                done_src[node] = 1;
                const std::size_t i = node;
                for (std::size_t j = 0; j < n; ++j) {
                    if (done_dst[j])
                        continue;
                    const double rc = std::max(0.0, costs(i, j) + pot_src[i] - pot_dst[j]);
                    if (best + rc < dist_dst[j]) {
                        dist_dst[j] = best + rc;
                        pred_dst[j] = i;
                    }
                }
            } else {
                done_dst[node] = 1;
                const std::size_t j = node;
                if (demand[j] > kDust) {
                    target = j;
                    break;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    if (done_src[i] || flow[i * n + j] <= 0.0)
                        continue;
                    const double rc = std::max(0.0, -costs(i, j) + pot_dst[j] - pot_src[i]);
                    if (best + rc < dist_src[i]) {
                        dist_src[i] = best + rc;
                        pred_src[i] = j;
                    }
                }
            }
        }
        if (target == kNone)
            throw Error(ErrorKind::internal, "exact transport found no augmenting path");

        const double reach = dist_dst[target];
        for (std::size_t i = 0; i < m; ++i)
            pot_src[i] += std::min(dist_src[i], reach);
        for (std::size_t j = 0; j < n; ++j)
            pot_dst[j] += std::min(dist_dst[j], reach);

        // Walk back from the target to the root source, finding the bottleneck.
        double delta = demand[target];
        std::size_t j = target;
        std::size_t root = kNone;
        for (;;) {
            const std::size_t i = pred_dst[j];
            if (pred_src[i] == kNone) {
                root = i;
                break;
            }
            j = pred_src[i];
            delta = std::min(delta, flow[i * n + j]);
        }
        delta = std::min(delta, supply[root]);

        j = target;
        for (;;) {
            const std::size_t i = pred_dst[j];
            flow[i * n + j] += delta;
            if (pred_src[i] == kNone)
                break;
            j = pred_src[i];
            flow[i * n + j] -= delta;
            if (flow[i * n + j] < kDust)
                flow[i * n + j] = 0.0;
        }
        supply[root] -= delta;
        demand[target] -= delta;
    }

    result.objective = detail::plan_cost(flow, costs);
    return result;
}

inline TransportResult solve_exact(const NBow& a, const NBow& b, const CostMatrix& costs) {
    return solve_exact(a.weights, b.weights, costs);
}

/// Entropically regularized transport in the log domain, followed by a
/// rounding step that projects the plan onto the exact marginals. The
/// reported objective is the cost of that feasible plan, so it can never
/// undercut the exact optimum.
inline TransportResult solve_sinkhorn(std::span<const double> supply, std::span<const double> demand,
                                      const CostMatrix& costs, double epsilon, std::size_t max_iter,
                                      double tolerance = 1e-9) {
    detail::check_marginals(supply, demand, costs);
    if (!(epsilon > 0.0))
        throw Error(ErrorKind::input, "sinkhorn epsilon must be positive");
    if (max_iter == 0)
        throw Error(ErrorKind::input, "sinkhorn max_iter must be positive");
    const std::size_t m = costs.rows;
    const std::size_t n = costs.cols;
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::vector<double> log_a(m), log_b(n);
    for (std::size_t i = 0; i < m; ++i)
        log_a[i] = supply[i] > 0.0 ? std::log(supply[i]) : kNegInf;
    for (std::size_t j = 0; j < n; ++j)
        log_b[j] = demand[j] > 0.0 ? std::log(demand[j]) : kNegInf;

    std::vector<double> f(m, 0.0), g(n, 0.0), scratch(std::max(m, n));
    auto lse = [](std::span<const double> v) {
        double hi = kNegInf;
        for (double x : v)
            hi = std::max(hi, x);
        if (hi == kNegInf)
            return kNegInf;
        double s = 0.0;
        for (double x : v)
            s += std::exp(x - hi);
        return hi + std::log(s);
    };

    TransportResult result{m, n, std::vector<double>(m * n, 0.0), 0.0, 0, false};
    std::vector<double> plan(m * n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        result.iterations = it + 1;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                scratch[j] = (g[j] - costs(i, j)) / epsilon;
            f[i] = log_a[i] == kNegInf ? kNegInf : epsilon * (log_a[i] - lse({scratch.data(), n}));
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < m; ++i)
                scratch[i] = (f[i] - costs(i, j)) / epsilon;
            g[j] = log_b[j] == kNegInf ? kNegInf : epsilon * (log_b[j] - lse({scratch.data(), m}));
        }
        // Columns are exact after the g update; check the rows.
        double err = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                row += std::exp((f[i] + g[j] - costs(i, j)) / epsilon);
            err = std::max(err, std::abs(row - supply[i]));
        }
        if (err < tolerance) {
            result.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            plan[i * n + j] = std::exp((f[i] + g[j] - costs(i, j)) / epsilon);

    // Round onto the transportation polytope.
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            row += plan[i * n + j];
        const double scale = row > supply[i] ? supply[i] / row : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            plan[i * n + j] *= scale;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            col += plan[i * n + j];
        const double scale = col > demand[j] ? demand[j] / col : 1.0;
        for (std::size_t i = 0; i < m; ++i)
            plan[i * n + j] *= scale;
    }
    std::vector<double> row_gap(m), col_gap(n);
    double col_gap_total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            row += plan[i * n + j];
        row_gap[i] = std::max(0.0, supply[i] - row);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            col += plan[i * n + j];
        col_gap[j] = std::max(0.0, demand[j] - col);
        col_gap_total += col_gap[j];
    }
    if (col_gap_total > 0.0)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                plan[i * n + j] += row_gap[i] * col_gap[j] / col_gap_total;

    result.flow = std::move(plan);
    result.objective = detail::plan_cost(result.flow, costs);
    return result;
}

inline TransportResult solve_sinkhorn(const NBow& a, const NBow& b, const CostMatrix& costs, double epsilon,
                                      std::size_t max_iter) {
    return solve_sinkhorn(a.weights, b.weights, costs, epsilon, max_iter);
}

/// Distance between the weighted embedding centroids of the two bags.
inline double wcd_lower_bound(const NBow& a, const NBow& b, const EmbeddingTable& table) {
    if (a.empty() || b.empty())
        throw Error(ErrorKind::empty_distribution, "centroid bound needs two non-empty distributions");
    std::vector<double> diff(table.dim(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto r = table.row(a.support[i]);
        for (std::size_t k = 0; k < diff.size(); ++k)
            diff[k] += a.weights[i] * r[k];
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        const auto r = table.row(b.support[j]);
        for (std::size_t k = 0; k < diff.size(); ++k)
            diff[k] -= b.weights[j] * r[k];
    }
    double sq = 0.0;
    for (double d : diff)
        sq += d * d;
    return std::sqrt(sq);
}

/// Larger of the two one-sided relaxations: every point ships all of its
/// mass to its nearest counterpart.
inline double rwmd_lower_bound(std::span<const double> supply, std::span<const double> demand,
                               const CostMatrix& costs) {
    detail::check_marginals(supply, demand, costs);
    double forward = 0.0;
    for (std::size_t i = 0; i < costs.rows; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < costs.cols; ++j)
            nearest = std::min(nearest, costs(i, j));
        forward += supply[i] * nearest;
    }
    double backward = 0.0;
    for (std::size_t j = 0; j < costs.cols; ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < costs.rows; ++i)
            nearest = std::min(nearest, costs(i, j));
        backward += demand[j] * nearest;
    }
    return std::max(forward, backward);
}

inline double rwmd_lower_bound(const NBow& a, const NBow& b, const CostMatrix& costs) {
    return rwmd_lower_bound(a.weights, b.weights, costs);
}

} // namespace semoverlap
