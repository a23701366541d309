// Per-ordinate sweep scheduling: the weighted element dependency graph,
// strongly connected components, minimum feedback-arc-set solves (exact
// subset DP on small components, greedy-removal heuristic on large ones)
// and the resulting element ordering with its lagged edges.
#pragma once

#include "hosweep/assembly.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

namespace hosweep {

/// Directed weighted graph over mesh elements. Edge u -> v means v is
/// downwind of u: v's equations couple to u's trace, so u should be solved
/// first.
struct DependencyGraph {
    struct Edge {
        int from = -1;
        int to = -1;
        double weight = 0.0;
        int coupling = -1;  // index into the ordinate's coupling list
    };
    int num_vertices = 0;
    std::vector<Edge> edges;

    std::vector<std::vector<int>> out_edges() const {
        std::vector<std::vector<int>> adj(num_vertices);
        for (size_t i = 0; i < edges.size(); ++i) adj[edges[i].from].push_back(int(i));
        return adj;
    }
};

enum class EdgeWeighting { unity, face, sig_inv_face };

inline const char* to_string(EdgeWeighting w) {
    switch (w) {
        case EdgeWeighting::unity: return "unity";
        case EdgeWeighting::face: return "face";
        case EdgeWeighting::sig_inv_face: return "siginvface";
    }
    return "?";
}

/// Build the dependency graph of one ordinate from its assembled face
/// couplings. Weights: unity -> 1; face -> max-element norm of the coupling
/// block; sig_inv_face -> max-element norm of (M_t,downwind)^{-1} block.
inline DependencyGraph build_graph(const TransportOperator& op, int ordinate,
                                   EdgeWeighting weighting) {
    const TransportOperator::PerOrdinate& ord = op.ordinates.at(ordinate);
    DependencyGraph g;
    g.num_vertices = op.num_elements();
    g.edges.reserve(ord.couplings.size());
    for (size_t c = 0; c < ord.couplings.size(); ++c) {
        const FaceCoupling& fc = ord.couplings[c];
        double w = 1.0;
        if (weighting == EdgeWeighting::face) {
            w = fc.block.cwiseAbs().maxCoeff();
        } else if (weighting == EdgeWeighting::sig_inv_face) {
            const Eigen::MatrixXd scaled =
                op.mass_total[fc.downwind].partialPivLu().solve(fc.block);
            if (!scaled.allFinite())
                throw AssemblyError(
                    "sig_inv_face weighting: singular mass matrix on element " +
                    std::to_string(fc.downwind));
            w = scaled.cwiseAbs().maxCoeff();
        }
        g.edges.push_back({fc.upwind, fc.downwind, w, static_cast<int>(c)});
    }
    return g;
}

/// Strongly connected components (iterative Tarjan). Components are emitted
/// in reverse topological order of the condensation; vertices within each
/// component are sorted ascending.
inline std::vector<std::vector<int>> tarjan_scc(const DependencyGraph& g) {
    const int n = g.num_vertices;
    const std::vector<std::vector<int>> adj = g.out_edges();

    std::vector<int> index(n, -1), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int next_index = 0;

    struct Frame {
        int v;
        size_t child;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& fr = call.back();
            if (fr.child < adj[fr.v].size()) {
                const int w = g.edges[adj[fr.v][fr.child++]].to;
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[fr.v] = std::min(lowlink[fr.v], index[w]);
                }
            } else {
                if (lowlink[fr.v] == index[fr.v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                    } while (w != fr.v);
                    std::sort(comp.begin(), comp.end());
                    sccs.push_back(std::move(comp));
                }
                const int v = fr.v;
                call.pop_back();
                if (!call.empty())
                    lowlink[call.back().v] = std::min(lowlink[call.back().v], lowlink[v]);
            }
        }
    }
    return sccs;
}

/// FAS result on an induced subgraph: the vertex ordering (global ids),
/// lagged edges as indices into the parent graph's edge list, and their
/// total weight.
struct FasResult {
    std::vector<int> order;
    std::vector<int> lagged_edges;
    double lagged_weight = 0.0;
};

namespace detail {

struct LocalGraph {
    std::vector<int> vertices;               // global ids, ascending
    std::vector<std::array<int, 2>> edges;   // local (from, to)
    std::vector<double> weights;
    std::vector<int> parent_edge;            // index into DependencyGraph::edges
};

inline LocalGraph induce(const DependencyGraph& g, const std::vector<int>& vertices) {
    LocalGraph lg;
    lg.vertices = vertices;
    std::vector<int> local(g.num_vertices, -1);
    for (size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = static_cast<int>(i);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& ed = g.edges[e];
        if (local[ed.from] >= 0 && local[ed.to] >= 0) {
            lg.edges.push_back({local[ed.from], local[ed.to]});
            lg.weights.push_back(ed.weight);
            lg.parent_edge.push_back(static_cast<int>(e));
        }
    }
    return lg;
}

/// Collect backward edges of a local ordering.
inline FasResult order_to_result(const LocalGraph& lg, const std::vector<int>& local_order) {
    FasResult res;
    std::vector<int> pos(lg.vertices.size());
    for (size_t k = 0; k < local_order.size(); ++k) pos[local_order[k]] = static_cast<int>(k);
    for (size_t e = 0; e < lg.edges.size(); ++e)
        if (pos[lg.edges[e][0]] > pos[lg.edges[e][1]]) {
            res.lagged_edges.push_back(lg.parent_edge[e]);
            res.lagged_weight += lg.weights[e];
        }
    res.order.reserve(local_order.size());
    for (int v : local_order) res.order.push_back(lg.vertices[v]);
    return res;
}

}  // namespace detail

/// Exact minimum-weight FAS on the subgraph induced by `vertices`, by
/// dynamic programming over vertex subsets (O(2^n n^2)). Ties are broken
/// toward lower vertex ids for reproducible orderings.
inline FasResult min_fas_exact(const DependencyGraph& g, const std::vector<int>& vertices) {
    const int n = static_cast<int>(vertices.size());
    if (n > 22) throw std::invalid_argument("min_fas_exact: component too large");
    detail::LocalGraph lg = detail::induce(g, vertices);

    // wout[v][u]: total weight of edges v -> u (parallel edges summed).
    std::vector<std::vector<double>> wout(n, std::vector<double>(n, 0.0));
    for (size_t e = 0; e < lg.edges.size(); ++e)
        wout[lg.edges[e][0]][lg.edges[e][1]] += lg.weights[e];

    const uint32_t full = (uint32_t(1) << n) - 1;
    std::vector<double> dp(full + 1, std::numeric_limits<double>::infinity());
    std::vector<int8_t> choice(full + 1, -1);
    dp[0] = 0.0;
    for (uint32_t mask = 1; mask <= full; ++mask) {
        for (int v = 0; v < n; ++v) {
            if (!(mask & (uint32_t(1) << v))) continue;
            const uint32_t rest = mask & ~(uint32_t(1) << v);
            if (dp[rest] == std::numeric_limits<double>::infinity()) continue;
            // v is ordered after every vertex in `rest`; its edges into
            // `rest` become backward (lagged).
            double back = 0.0;
            for (int u = 0; u < n; ++u)
                if (rest & (uint32_t(1) << u)) back += wout[v][u];
            const double cand = dp[rest] + back;
            if (cand < dp[mask]) {
                dp[mask] = cand;
                choice[mask] = static_cast<int8_t>(v);
            }
        }
    }

    std::vector<int> local_order(n);
    uint32_t mask = full;
    for (int k = n - 1; k >= 0; --k) {
        const int v = choice[mask];
        local_order[k] = v;
        mask &= ~(uint32_t(1) << v);
    }
    return detail::order_to_result(lg, local_order);
}

/// Greedy-removal FAS heuristic (Eades, Lin, Smyth), weighted variant:
/// repeatedly strip pure sinks to the tail and pure sources to the head;
/// otherwise move the vertex with maximal (weighted out-degree - weighted
/// in-degree) to the head. Ties break toward lower vertex ids.
inline FasResult min_fas_heuristic(const DependencyGraph& g, const std::vector<int>& vertices) {
    detail::LocalGraph lg = detail::induce(g, vertices);
    const int n = static_cast<int>(lg.vertices.size());

    std::vector<std::vector<std::pair<int, double>>> out(n), in(n);
    std::vector<double> wout(n, 0.0), win(n, 0.0);
    std::vector<int> dout(n, 0), din(n, 0);
    for (size_t e = 0; e < lg.edges.size(); ++e) {
        const int u = lg.edges[e][0], v = lg.edges[e][1];
        const double w = lg.weights[e];
        out[u].push_back({v, w});
        in[v].push_back({u, w});
        wout[u] += w;
        win[v] += w;
        dout[u]++;
        din[v]++;
    }

    std::vector<bool> removed(n, false);
    std::vector<int> head, tail;
    auto drop = [&](int v) {
        removed[v] = true;
        for (const auto& [u, w] : out[v]) {
            if (removed[u]) continue;
            din[u]--;
            win[u] -= w;
        }
        for (const auto& [u, w] : in[v]) {
            if (removed[u]) continue;
            dout[u]--;
            wout[u] -= w;
        }
    };

    int left = n;
    while (left > 0) {
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (int v = 0; v < n; ++v)
                if (!removed[v] && dout[v] == 0) {
                    drop(v);
                    tail.push_back(v);
                    left--;
                    progressed = true;
                }
        }
        progressed = true;
        while (progressed) {
            progressed = false;
            for (int v = 0; v < n; ++v)
                if (!removed[v] && dout[v] > 0 && din[v] == 0) {
                    drop(v);
                    head.push_back(v);
                    left--;
                    progressed = true;
                }
        }
        if (left == 0) break;
        int best = -1;
        double best_delta = -std::numeric_limits<double>::infinity();
        for (int v = 0; v < n; ++v) {
            if (removed[v]) continue;
            const double delta = wout[v] - win[v];
            if (delta > best_delta) {
                best_delta = delta;
                best = v;
            }
        }
        drop(best);
        head.push_back(best);
        left--;
    }

    std::vector<int> local_order = std::move(head);
    local_order.insert(local_order.end(), tail.rbegin(), tail.rend());
    return detail::order_to_result(lg, local_order);
}

/// Element ordering for one ordinate plus its lagged (removed) edges.
struct SweepOrdering {
    std::vector<int> order;         // order[k] = element visited k-th
    std::vector<int> position;      // inverse permutation
    std::vector<int> lagged_edges;  // indices into the graph's edge list
    double lagged_weight = 0.0;

    bool is_lagged_position(int from, int to) const { return position[from] > position[to]; }
};

/// Compose the global ordering: topological order of the SCC condensation
/// (ties toward the component holding the smallest element id), with each
/// non-trivial SCC ordered internally by exact DP when its size is at most
/// `exact_threshold`, otherwise by the greedy-removal heuristic.
inline SweepOrdering sweep_ordering(const DependencyGraph& g, int exact_threshold = 10) {
    const std::vector<std::vector<int>> sccs = tarjan_scc(g);
    const int n = g.num_vertices;
    std::vector<int> comp_of(n, -1);
    for (size_t c = 0; c < sccs.size(); ++c)
        for (int v : sccs[c]) comp_of[v] = static_cast<int>(c);

    // Condensation in-degrees.
    const int nc = static_cast<int>(sccs.size());
    std::vector<std::vector<int>> cond_out(nc);
    std::vector<int> cond_in(nc, 0);
    for (const auto& e : g.edges) {
        const int cu = comp_of[e.from], cv = comp_of[e.to];
        if (cu != cv) cond_out[cu].push_back(cv);
    }
    for (int c = 0; c < nc; ++c) {
        std::sort(cond_out[c].begin(), cond_out[c].end());
        cond_out[c].erase(std::unique(cond_out[c].begin(), cond_out[c].end()),
                          cond_out[c].end());
        for (int t : cond_out[c]) cond_in[t]++;
    }

    // Kahn over the condensation, smallest contained element id first.
    using Key = std::pair<int, int>;  // (min element id, component)
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> ready;
    for (int c = 0; c < nc; ++c)
        if (cond_in[c] == 0) ready.push({sccs[c].front(), c});

    SweepOrdering result;
    result.order.reserve(n);
    while (!ready.empty()) {
        const int c = ready.top().second;
        ready.pop();
        if (sccs[c].size() == 1) {
            result.order.push_back(sccs[c].front());
        } else {
            const FasResult fas =
                static_cast<int>(sccs[c].size()) <= std::min(exact_threshold, 22)
                    ? min_fas_exact(g, sccs[c])
                    : min_fas_heuristic(g, sccs[c]);
            result.order.insert(result.order.end(), fas.order.begin(), fas.order.end());
            result.lagged_edges.insert(result.lagged_edges.end(), fas.lagged_edges.begin(),
                                       fas.lagged_edges.end());
            result.lagged_weight += fas.lagged_weight;
        }
        for (int t : cond_out[c])
            if (--cond_in[t] == 0) ready.push({sccs[t].front(), t});
    }
    if (static_cast<int>(result.order.size()) != n)
        throw std::logic_error("sweep_ordering: condensation was not acyclic");

    result.position.assign(n, -1);
    for (int k = 0; k < n; ++k) result.position[result.order[k]] = k;

    // Retained edges must respect the ordering; the lagged set is exactly
    // the backward edges.
    std::vector<bool> lagged(g.edges.size(), false);
    for (int e : result.lagged_edges) lagged[e] = true;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const bool backward = result.position[g.edges[e].from] > result.position[g.edges[e].to];
        if (backward != lagged[e])
            throw std::logic_error("sweep_ordering: retained edge set is inconsistent");
    }
    std::sort(result.lagged_edges.begin(), result.lagged_edges.end());
    return result;
}

/// Shape of one ordinate's cycle structure, in the style of the solver's
/// diagnostic tables: size-2 components are "simple" cycles, larger ones
/// are reported with their sizes.
struct GraphSummary {
    int total_edges = 0;
    int simple_sccs = 0;                // components of size exactly 2
    int large_sccs = 0;                 // components of size >= 3
    std::vector<int> large_scc_sizes;   // descending
    int lagged_edges = 0;
    double lagged_weight = 0.0;

    bool cyclic() const { return simple_sccs + large_sccs > 0; }
};

inline GraphSummary summarize_graph(const DependencyGraph& g, const SweepOrdering& ordering) {
    GraphSummary s;
    s.total_edges = static_cast<int>(g.edges.size());
    for (const auto& scc : tarjan_scc(g)) {
        if (scc.size() == 2) s.simple_sccs++;
        if (scc.size() >= 3) {
            s.large_sccs++;
            s.large_scc_sizes.push_back(static_cast<int>(scc.size()));
        }
    }
    std::sort(s.large_scc_sizes.rbegin(), s.large_scc_sizes.rend());
    s.lagged_edges = static_cast<int>(ordering.lagged_edges.size());
    s.lagged_weight = ordering.lagged_weight;
    return s;
}

/// DOT export for visual inspection; lagged edges are dashed.
inline void write_dot(std::ostream& os, const DependencyGraph& g,
                      const SweepOrdering& ordering) {
    std::vector<bool> lagged(g.edges.size(), false);
    for (int e : ordering.lagged_edges) lagged[e] = true;
    os << "digraph sweep {\n";
    for (int v = 0; v < g.num_vertices; ++v)
        os << "  e" << v << " [label=\"" << v << " (#" << ordering.position[v] << ")\"];\n";
    for (size_t e = 0; e < g.edges.size(); ++e) {
        os << "  e" << g.edges[e].from << " -> e" << g.edges[e].to << " [label=\""
           << g.edges[e].weight << "\"";
        if (lagged[e]) os << ", style=dashed";
        os << "];\n";
    }
    os << "}\n";
}

}  // namespace hosweep
