#include "ccop/morse.hpp"

#include "ccop/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <set>

namespace ccop {

namespace {

constexpr int kMaxMorseDim = 4;

/// Grid nodes on the union of coordinate subspaces of dimension <= s. Each
/// support J owns a dense block of grid^|J| nodes; a node with a zero
/// coordinate in J is represented by the block of the smaller support.
class SparsityGrid {
public:
    SparsityGrid(const Problem& p, int grid) : p_(p), grid_(grid) {
        const int n = p.n();
        axes_.resize(static_cast<std::size_t>(n));
        zero_index_.assign(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < n; ++i) {
            const Interval& iv = p.box()[static_cast<std::size_t>(i)];
            auto& ax = axes_[static_cast<std::size_t>(i)];
            ax.resize(static_cast<std::size_t>(grid));
            for (int j = 0; j < grid; ++j)
                ax[static_cast<std::size_t>(j)] = iv.lo + iv.width() * j / (grid - 1);
            if (iv.contains(0.0)) {
                auto it = std::min_element(ax.begin(), ax.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
                *it = 0.0;
                zero_index_[static_cast<std::size_t>(i)] = static_cast<int>(it - ax.begin());
            }
        }

        block_of_.assign(std::size_t{1} << n, -1);
        std::vector<unsigned> masks;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (std::popcount(mask) > p.s()) continue;
            bool ok = true;
            for (int i = 0; i < n; ++i)
                if (!(mask & (1u << i)) && zero_index_[static_cast<std::size_t>(i)] < 0) ok = false;
            if (ok) masks.push_back(mask);
        }
        std::stable_sort(masks.begin(), masks.end(),
                         [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
        long long offset = 0;
        for (unsigned mask : masks) {
            Block b;
            b.mask = mask;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) b.axes.push_back(i);
            b.offset = offset;
            b.size = 1;
            for (std::size_t a = 0; a < b.axes.size(); ++a) b.size *= grid;
            offset += b.size;
            block_of_[mask] = static_cast<int>(blocks_.size());
            blocks_.push_back(std::move(b));
        }
        total_ = offset;
    }

    long long size() const { return total_; }

    /// f at every node, NaN where the node is not (band-)feasible.
    std::vector<double> evaluate(const std::vector<double>& h_band,
                                 const std::vector<double>& g_band) const {
        std::vector<double> f(static_cast<std::size_t>(total_),
                              std::numeric_limits<double>::quiet_NaN());
        Eigen::VectorXd x(p_.n());
        for (const Block& b : blocks_) {
            std::vector<int> idx(b.axes.size(), 0);
            for (long long local = 0; local < b.size; ++local, advance(idx)) {
                if (!is_canonical(b, idx)) continue;
                x.setZero();
                for (std::size_t a = 0; a < b.axes.size(); ++a)
                    x[b.axes[a]] = axes_[static_cast<std::size_t>(b.axes[a])][static_cast<std::size_t>(idx[a])];
                f[static_cast<std::size_t>(b.offset + local)] = node_value(x, h_band, g_band);
            }
        }
        return f;
    }

    /// Calls visit(u, v) for every pair of grid-adjacent nodes.
    template <class Visit>
    void for_each_edge(Visit&& visit) const {
        for (const Block& b : blocks_) {
            std::vector<int> idx(b.axes.size(), 0);
            for (long long local = 0; local < b.size; ++local, advance(idx)) {
                const long long u = canonical_id(b, idx);
                for (std::size_t a = 0; a < idx.size(); ++a) {
                    if (idx[a] + 1 >= grid_) continue;
                    ++idx[a];
                    const long long v = canonical_id(b, idx);
                    --idx[a];
                    if (u != v) visit(u, v);
                }
            }
        }
    }

private:
    struct Block {
        unsigned mask = 0;
        std::vector<int> axes;
        long long offset = 0;
        long long size = 0;
    };

    void advance(std::vector<int>& idx) const {
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (++idx[a] < grid_) return;
            idx[a] = 0;
        }
    }

    bool is_canonical(const Block& b, const std::vector<int>& idx) const {
        for (std::size_t a = 0; a < idx.size(); ++a)
            if (idx[a] == zero_index_[static_cast<std::size_t>(b.axes[a])]) return false;
        return true;
    }

    long long canonical_id(const Block& b, const std::vector<int>& idx) const {
        unsigned mask = 0;
        long long local = 0, stride = 1;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (idx[a] == zero_index_[static_cast<std::size_t>(b.axes[a])]) continue;
            mask |= 1u << b.axes[a];
            local += stride * idx[a];
            stride *= grid_;
        }
        return blocks_[static_cast<std::size_t>(block_of_[mask])].offset + local;
    }

    double node_value(const Eigen::VectorXd& x, const std::vector<double>& h_band,
                      const std::vector<double>& g_band) const {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
            for (int j = 0; j < p_.num_equalities(); ++j)
                if (std::abs(p_.equalities()[static_cast<std::size_t>(j)].value(x)) >
                    h_band[static_cast<std::size_t>(j)])
                    return nan;
            for (int q = 0; q < p_.num_inequalities(); ++q)
                if (p_.inequalities()[static_cast<std::size_t>(q)].value(x) <
                    -g_band[static_cast<std::size_t>(q)])
                    return nan;
            return p_.objective().value(x);
        } catch (const DomainError&) {
            return nan;
        }
    }

    const Problem& p_;
    int grid_;
    std::vector<std::vector<double>> axes_;
    std::vector<int> zero_index_;
    std::vector<Block> blocks_;
    std::vector<int> block_of_;
    long long total_ = 0;
};

/// 2 * (widest box side / grid) * (largest gradient norm on a coarse box
/// sample), per constraint.
std::vector<double> bands(const Problem& p, const std::vector<SmoothFunction>& fns, int grid) {
    constexpr int kSample = 9;
    double width = 0.0;
    for (const auto& iv : p.box()) width = std::max(width, iv.width());
    const double step = width / grid;
    std::vector<double> out;
    for (const auto& fn : fns) {
        double gmax = 0.0;
        std::vector<int> idx(static_cast<std::size_t>(p.n()), 0);
        Eigen::VectorXd x(p.n());
        for (;;) {
            for (int i = 0; i < p.n(); ++i) {
                const Interval& iv = p.box()[static_cast<std::size_t>(i)];
                x[i] = iv.lo + iv.width() * idx[static_cast<std::size_t>(i)] / (kSample - 1);
            }
            try {
                gmax = std::max(gmax, fn.gradient(x).norm());
            } catch (const DomainError&) {
            }
            std::size_t a = 0;
            while (a < idx.size() && ++idx[a] == kSample) idx[a++] = 0;
            if (a == idx.size()) break;
        }
        out.push_back(2.0 * step * gmax);
    }
    return out;
}

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
    std::vector<std::size_t> parent;
    std::vector<long long> size;
};

void check_morse_preconditions(const Problem& p, int grid) {
    if (!p.compact_feasible_asserted())
        throw PreconditionError("Morse analysis requires compact_feasible = true");
    if (p.n() > kMaxMorseDim) throw PreconditionError("Morse analysis supports n <= 4");
    if (grid < 2) throw PreconditionError("grid must have at least 2 nodes per axis");
}

struct PreparedGrid {
    std::unique_ptr<SparsityGrid> grid;
    std::vector<double> f;
};

PreparedGrid prepare(const Problem& p, int grid) {
    check_morse_preconditions(p, grid);
    PreparedGrid g;
    g.grid = std::make_unique<SparsityGrid>(p, grid);
    g.f = g.grid->evaluate(bands(p, p.equalities(), grid), bands(p, p.inequalities(), grid));
    return g;
}

ComponentCount count_at(const PreparedGrid& g, double level) {
    const auto n = g.f.size();
    auto kept = [&](long long i) { return g.f[static_cast<std::size_t>(i)] <= level; };
    UnionFind uf(n);
    g.grid->for_each_edge([&](long long u, long long v) {
        if (kept(u) && kept(v)) uf.unite(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    });
    ComponentCount out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept(static_cast<long long>(i))) continue;
        ++out.nodes;
        if (uf.find(i) == i) {
            ++out.components;
            if (uf.size[i] < 3) out.coarse = true;
        }
    }
    return out;
}

}  // namespace

ComponentCount lower_level_components(const Problem& p, double level, int grid_per_axis,
                                      const Tolerances&) {
    return count_at(prepare(p, grid_per_axis), level);
}

std::vector<int> predicted_deltas(const Problem& p, const Nondegeneracy& nd, std::string* rule) {
    if (!nd.m_index) throw PreconditionError("transition rules need a nondegenerate point");
    auto set_rule = [&](const char* r) {
        if (rule) *rule = r;
    };
    if (*nd.m_index == 0) {
        set_rule("minimizer");
        return {1};
    }
    if (*nd.m_index == 1 && nd.k == p.s()) {
        set_rule("index 1 with ACC");
        return {-1, 0};
    }
    if (*nd.m_index == 1 && nd.k == p.s() - 1) {
        set_rule("index 1 with k = s-1");
        std::vector<int> out;
        for (int d = -(p.n() - p.s()); d <= 0; ++d) out.push_back(d);
        return out;
    }
    set_rule("no change");
    return {0};
}

LevelSweepReport level_sweep(const Problem& p, const std::vector<MStationaryPair>& points,
                             const std::vector<Classification>& classes, int grid_per_axis,
                             const Tolerances& t, const std::optional<std::vector<double>>& levels) {
    if (points.size() != classes.size())
        throw DimensionError("one classification per stationary point expected");
    LevelSweepReport rep;
    rep.grid = grid_per_axis;

    std::vector<double> values;
    for (const auto& pt : points) values.push_back(p.objective().value(pt.x));
    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
    });

    // groups of coincident values
    std::vector<std::vector<int>> groups;
    for (int i : order) {
        const double v = values[static_cast<std::size_t>(i)];
        if (!groups.empty()) {
            const double w = values[static_cast<std::size_t>(groups.back().front())];
            if (std::abs(v - w) <= 10.0 * t.tol * std::max(1.0, std::abs(w))) {
                groups.back().push_back(i);
                continue;
            }
        }
        groups.push_back({i});
    }
    auto group_value = [&](const std::vector<int>& g) {
        return values[static_cast<std::size_t>(g.front())];
    };

    if (levels) {
        rep.levels = *levels;
        std::sort(rep.levels.begin(), rep.levels.end());
        rep.levels.erase(std::unique(rep.levels.begin(), rep.levels.end()), rep.levels.end());
    } else if (groups.empty()) {
        rep.levels = {0.0};
    } else {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t g = 1; g < groups.size(); ++g)
            gap = std::min(gap, group_value(groups[g]) - group_value(groups[g - 1]));
        if (!std::isfinite(gap)) gap = 1.0;
        rep.levels.push_back(group_value(groups.front()) - 0.5 * gap);
        for (std::size_t g = 1; g < groups.size(); ++g) {
            const double a = group_value(groups[g - 1]), b = group_value(groups[g]);
            for (double frac : {0.25, 0.5, 0.75}) rep.levels.push_back(a + frac * (b - a));
        }
        rep.levels.push_back(group_value(groups.back()) + 0.5 * gap);
    }

    const PreparedGrid grid = prepare(p, grid_per_axis);
    for (double level : rep.levels) {
        const ComponentCount c = count_at(grid, level);
        rep.beta0.push_back(c.components);
        rep.coarse.push_back(c.coarse);
    }

    // bracket every group by sampled levels; groups sharing a bracket merge
    std::vector<std::pair<int, int>> brackets;
    for (const auto& g : groups) {
        const double v = group_value(g);
        int below = -1, above = -1;
        for (std::size_t l = 0; l < rep.levels.size(); ++l) {
            if (rep.levels[l] < v) below = static_cast<int>(l);
            if (rep.levels[l] > v && above < 0) above = static_cast<int>(l);
        }
        if (below < 0 || above < 0) {
            for (int i : g) rep.unbracketed.push_back(i);
            brackets.emplace_back(-1, -1);
            continue;
        }
        brackets.emplace_back(below, above);
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (brackets[g].first < 0) continue;
        if (!rep.crossings.empty() && g > 0 && brackets[g] == brackets[g - 1] &&
            rep.crossings.back().level_below == rep.levels[static_cast<std::size_t>(brackets[g].first)]) {
            Crossing& c = rep.crossings.back();
            c.points.insert(c.points.end(), groups[g].begin(), groups[g].end());
            continue;
        }
        Crossing c;
        c.points = groups[g];
        c.value = group_value(groups[g]);
        c.level_below = rep.levels[static_cast<std::size_t>(brackets[g].first)];
        c.level_above = rep.levels[static_cast<std::size_t>(brackets[g].second)];
        c.observed = rep.beta0[static_cast<std::size_t>(brackets[g].second)] -
                     rep.beta0[static_cast<std::size_t>(brackets[g].first)];
        rep.crossings.push_back(std::move(c));
    }

    for (Crossing& c : rep.crossings) {
        std::set<int> sum = {0};
        std::vector<std::string> rules;
        bool classified = true;
        for (int i : c.points) {
            const Nondegeneracy& nd = classes[static_cast<std::size_t>(i)].nd;
            if (!nd.m_index) {
                classified = false;
                rules.push_back("degenerate");
                continue;
            }
            std::string rule;
            const std::vector<int> d = predicted_deltas(p, nd, &rule);
            rules.push_back(rule);
            std::set<int> next;
            for (int a : sum)
                for (int b : d) next.insert(a + b);
            sum = std::move(next);
        }
        for (std::size_t r = 0; r < rules.size(); ++r) c.rule += (r ? " + " : "") + rules[r];
        if (classified) c.predicted.assign(sum.begin(), sum.end());
        c.ok = classified && sum.count(c.observed) > 0;
        // several points in one crossing: coincident values or levels too sparse
        c.indeterminate = !classified || c.points.size() > 1;
        if (c.indeterminate) rep.indeterminate = true;
        if (!c.ok && !c.indeterminate) rep.violations = true;
    }

    for (std::size_t l = 1; l < rep.levels.size(); ++l) {
        bool crosses = false;
        for (double v : values)
            if (rep.levels[l - 1] < v && v <= rep.levels[l]) crosses = true;
        if (!crosses && rep.beta0[l] != rep.beta0[l - 1]) rep.deformation_ok = false;
    }
    if (!rep.unbracketed.empty()) rep.indeterminate = true;
    return rep;
}

long long binomial(int a, int b) {
    if (b < 0 || a < 0 || b > a) return 0;
    long long r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

CellAttachment attached_cells(const Problem& p, const Nondegeneracy& nd) {
    if (nd.nondegenerate != Tri::holds || !nd.qi)
        throw PreconditionError("cell attachment needs a nondegenerate point");
    CellAttachment out;
    const int u = p.n() - nd.k;
    const int v = p.s() - nd.k;
    out.count = static_cast<int>(binomial(u - 1, v));
    out.dim = v + *nd.qi;
    // J = {1} u C, C a v-subset of {2..u}, lexicographic
    std::vector<int> c(static_cast<std::size_t>(v));
    for (int i = 0; i < v; ++i) c[static_cast<std::size_t>(i)] = i + 2;
    if (v > u - 1) return out;
    for (;;) {
        std::vector<int> J = {1};
        J.insert(J.end(), c.begin(), c.end());
        out.simplex_supports.push_back(std::move(J));
        int i = v - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == u - v + 1 + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < v; ++j)
            c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

MountainPass mountain_pass_check(const Problem& p, const std::vector<Classification>& classes) {
    if (!p.compact_feasible_asserted())
        throw PreconditionError("mountain-pass count requires compact_feasible = true");
    MountainPass mp;
    for (const auto& c : classes) {
        if (!c.nd.m_index) throw PreconditionError("mountain-pass count needs nondegenerate points");
        if (*c.nd.m_index == 0) ++mp.r;
        if (*c.nd.m_index == 1 && c.nd.k == p.s()) ++mp.r1;
        if (*c.nd.m_index == 1 && c.nd.k == p.s() - 1) ++mp.r2;
    }
    mp.lhs = mp.r1 + (p.n() - p.s()) * mp.r2;
    mp.rhs = mp.r - 1;
    mp.holds = mp.lhs >= mp.rhs;
    return mp;
}

}  // namespace ccop
