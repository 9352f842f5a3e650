#pragma once

// Test-only reference solvers for the transportation problem. Nothing here
// shares code with the library's transport solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Dense two-phase tableau simplex with Bland's rule for
///   min c.x  s.t.  A x = b, x >= 0   (b >= 0).
/// Returns the optimal objective; throws if infeasible or unbounded.
class SimplexLP {
public:
    SimplexLP(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

    double solve() {
        const std::size_t m = a_.size();
        const std::size_t n = c_.size();
        const std::size_t width = n + m + 1;
        tab_.assign(m + 1, std::vector<double>(width, 0.0));
        basis_.assign(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const double sign = b_[i] < 0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n; ++j)
                tab_[i][j] = sign * a_[i][j];
            tab_[i][n + i] = 1.0;
            tab_[i][width - 1] = sign * b_[i];
            basis_[i] = n + i;
        }
        // Phase I: minimize the sum of artificials.
        std::vector<double> phase1(width, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            phase1[n + i] = 1.0;
        set_objective(phase1);
        run(n + m);
        if (tab_[m][width - 1] < -1e-9)
            throw std::runtime_error("LP infeasible");

        // Drive zero-level artificials out of the basis or drop their rows.
        for (std::size_t i = 0; i < tab_.size() - 1;) {
            if (basis_[i] < n) {
                ++i;
                continue;
            }
            std::size_t col = n;
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(tab_[i][j]) > 1e-11) {
                    col = j;
                    break;
                }
            if (col == n) {
                tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            pivot(i, col);
            ++i;
        }
        // Phase II over the structural columns only.
        std::vector<double> phase2(width, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            phase2[j] = c_[j];
        set_objective(phase2);
        run(n);
        return -tab_.back()[width - 1];
    }

    std::vector<double> solution() const {
        std::vector<double> x(c_.size(), 0.0);
        for (std::size_t i = 0; i < basis_.size(); ++i)
            if (basis_[i] < c_.size())
                x[basis_[i]] = tab_[i].back();
        return x;
    }

private:
    void set_objective(const std::vector<double>& cost) {
        auto& obj = tab_.back();
        obj = cost;
        for (std::size_t i = 0; i + 1 < tab_.size(); ++i) {
            const double f = obj[basis_[i]];
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j < obj.size(); ++j)
                obj[j] -= f * tab_[i][j];
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        auto& pr = tab_[row];
        const double p = pr[col];
        for (double& v : pr)
            v /= p;
        for (std::size_t i = 0; i < tab_.size(); ++i) {
            if (i == row)
                continue;
            const double f = tab_[i][col];
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j < pr.size(); ++j)
                tab_[i][j] -= f * pr[j];
        }
        basis_[row] = col;
    }

    // Bland's rule: lowest-index entering column with negative reduced cost,
    // lowest-index basic variable among ratio-test ties.
    void run(std::size_t allowed_cols) {
        const std::size_t rhs = tab_.front().size() - 1;
        for (std::size_t guard = 0; guard < 100000; ++guard) {
            auto& obj = tab_.back();
            std::size_t enter = allowed_cols;
            for (std::size_t j = 0; j < allowed_cols; ++j)
                if (obj[j] < -1e-12) {
                    enter = j;
                    break;
                }
            if (enter == allowed_cols)
                return;
            std::size_t leave = tab_.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < tab_.size(); ++i) {
                if (tab_[i][enter] <= 1e-12)
                    continue;
                const double ratio = tab_[i][rhs] / tab_[i][enter];
                if (leave == tab_.size() || ratio < best - 1e-15 ||
                    (ratio <= best + 1e-15 && basis_[i] < basis_[leave])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave == tab_.size())
                throw std::runtime_error("LP unbounded");
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex iteration guard hit");
    }

    std::vector<std::vector<double>> a_;
    std::vector<double> b_;
    std::vector<double> c_;
    std::vector<std::vector<double>> tab_;
    std::vector<std::size_t> basis_;
};

/// Minimum transport cost via the generic LP above. `costs` is row-major.
inline double transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                           const std::vector<double>& costs) {
    const std::size_t m = supply.size(), n = demand.size();
    std::vector<std::vector<double>> a(m + n, std::vector<double>(m * n, 0.0));
    std::vector<double> b(m + n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            a[i][i * n + j] = 1.0;
        b[i] = supply[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i)
            a[m + j][i * n + j] = 1.0;
        b[m + j] = demand[j];
    }
    SimplexLP lp(std::move(a), std::move(b), costs);
    return lp.solve();
}

/// Minimum over all vertices of the transportation polytope: every basic
/// solution is supported on a spanning tree of the bipartite graph, so try
/// every (m+n-1)-subset of cells that forms one. Only for tiny instances.
inline double transport_vertices(const std::vector<double>& supply, const std::vector<double>& demand,
                                 const std::vector<double>& costs) {
    const std::size_t m = supply.size(), n = demand.size();
    const std::size_t cells = m * n, need = m + n - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(need);
    std::iota(pick.begin(), pick.end(), 0);
    auto evaluate = [&] {
        // Peel leaves: a row or column touching exactly one unsolved cell
        // fixes that cell's flow.
        std::vector<double> rs(supply), cs(demand);
        std::vector<char> solved(need, 0);
        std::vector<double> x(need, 0.0);
        for (std::size_t round = 0; round < need; ++round) {
            bool progress = false;
            for (std::size_t node = 0; node < m + n && !progress; ++node) {
                std::size_t count = 0, which = 0;
                for (std::size_t k = 0; k < need; ++k) {
                    if (solved[k])
                        continue;
                    const std::size_t i = pick[k] / n, j = pick[k] % n;
                    if ((node < m && i == node) || (node >= m && j == node - m)) {
                        ++count;
                        which = k;
                    }
                }
                if (count != 1)
                    continue;
                const std::size_t i = pick[which] / n, j = pick[which] % n;
                x[which] = node < m ? rs[i] : cs[j];
                rs[i] -= x[which];
                cs[j] -= x[which];
                solved[which] = 1;
                progress = true;
            }
            if (!progress)
                return; // cycle: not a tree
        }
        for (double r : rs)
            if (std::abs(r) > 1e-9)
                return;
        for (double c : cs)
            if (std::abs(c) > 1e-9)
                return;
        double total = 0.0;
        for (std::size_t k = 0; k < need; ++k) {
            if (x[k] < -1e-12)
                return;
            total += x[k] * costs[pick[k]];
        }
        best = std::min(best, total);
    };
    for (;;) {
        evaluate();
        std::size_t k = need;
        while (k > 0 && pick[k - 1] == cells - need + (k - 1))
            --k;
        if (k == 0)
            break;
        ++pick[k - 1];
        for (std::size_t t = k; t < need; ++t)
            pick[t] = pick[t - 1] + 1;
    }
    return best;
}

} // namespace oracle
