#include "wena/graph_metrics.hpp"

#include "wena/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace wena {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tolerance for "same shortest-path length" when counting path multiplicity.
constexpr double kPathTie = 1e-12;

struct Adjacency {
    // neighbor index, edge length (1/weight)
    std::vector<std::vector<std::pair<Eigen::Index, double>>> next;
};

Adjacency build_adjacency(const SparseNetwork& net) {
    Adjacency adj;
    adj.next.resize(static_cast<std::size_t>(net.n));
    for (const auto& e : net.edges) {
        if (!(e.weight > 0.0))
            throw Error(ErrorCode::InvalidArgument,
                        "graph metrics need positive edge weights");
        const double length = 1.0 / e.weight;
        adj.next[static_cast<std::size_t>(e.i)].push_back({e.j, length});
        adj.next[static_cast<std::size_t>(e.j)].push_back({e.i, length});
    }
    return adj;
}

// Dijkstra over an adjacency restricted to `allowed` nodes (empty = all).
std::vector<double> shortest_paths(const Adjacency& adj, Eigen::Index source,
                                   const std::vector<char>& allowed) {
    const std::size_t n = adj.next.size();
    std::vector<double> dist(n, kInf);
    using Item = std::pair<double, Eigen::Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    dist[static_cast<std::size_t>(source)] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, len] : adj.next[static_cast<std::size_t>(u)]) {
            if (!allowed.empty() && !allowed[static_cast<std::size_t>(v)]) continue;
            const double nd = d + len;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                queue.push({nd, v});
            }
        }
    }
    return dist;
}

}  // namespace

Vector degree_centrality(const SparseNetwork& net) {
    Vector degree = Vector::Zero(net.n);
    for (const auto& e : net.edges) {
        degree(e.i) += 1.0;
        degree(e.j) += 1.0;
    }
    return degree;
}

Vector node_strength(const SparseNetwork& net) {
    Vector strength = Vector::Zero(net.n);
    for (const auto& e : net.edges) {
        if (e.weight < 0.0)
            throw Error(ErrorCode::InvalidArgument, "node_strength: negative edge weight");
        strength(e.i) += e.weight;
        strength(e.j) += e.weight;
    }
    return strength;
}

Vector betweenness_centrality(const SparseNetwork& net) {
    const Eigen::Index n = net.n;
    Vector bc = Vector::Zero(n);
    if (net.edges.empty()) return bc;
    const Adjacency adj = build_adjacency(net);

    // Brandes: one Dijkstra per source with fractional path counting, then
    // dependency accumulation. Each unordered pair is visited from both
    // endpoints, so the final scores are halved.
    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<double> sigma(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    std::vector<std::vector<Eigen::Index>> preds(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> order;  // settle order
    order.reserve(static_cast<std::size_t>(n));

    for (Eigen::Index s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order.clear();

        using Item = std::pair<double, Eigen::Index>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
        std::vector<char> settled(static_cast<std::size_t>(n), 0);
        dist[static_cast<std::size_t>(s)] = 0.0;
        sigma[static_cast<std::size_t>(s)] = 1.0;
        queue.push({0.0, s});

        while (!queue.empty()) {
            const auto [d, u] = queue.top();
            queue.pop();
            if (settled[static_cast<std::size_t>(u)]) continue;
            settled[static_cast<std::size_t>(u)] = 1;
            order.push_back(u);
            for (const auto& [v, len] : adj.next[static_cast<std::size_t>(u)]) {
                const double nd = d + len;
                const double tie = kPathTie * std::max(1.0, std::fabs(nd));
                if (nd < dist[static_cast<std::size_t>(v)] - tie) {
                    dist[static_cast<std::size_t>(v)] = nd;
                    sigma[static_cast<std::size_t>(v)] = sigma[static_cast<std::size_t>(u)];
                    preds[static_cast<std::size_t>(v)].assign(1, u);
                    queue.push({nd, v});
                } else if (std::fabs(nd - dist[static_cast<std::size_t>(v)]) <= tie &&
                           !settled[static_cast<std::size_t>(v)]) {
                    sigma[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(u)];
                    preds[static_cast<std::size_t>(v)].push_back(u);
                }
            }
        }

        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const Eigen::Index w = *it;
            for (const Eigen::Index v : preds[static_cast<std::size_t>(w)]) {
                delta[static_cast<std::size_t>(v)] +=
                    sigma[static_cast<std::size_t>(v)] / sigma[static_cast<std::size_t>(w)] *
                    (1.0 + delta[static_cast<std::size_t>(w)]);
            }
            if (w != s) bc(w) += delta[static_cast<std::size_t>(w)];
        }
    }
    return bc * 0.5;
}

Vector local_efficiency(const SparseNetwork& net) {
    const Eigen::Index n = net.n;
    Vector eff = Vector::Zero(n);
    if (net.edges.empty()) return eff;
    const Adjacency adj = build_adjacency(net);

    for (Eigen::Index v = 0; v < n; ++v) {
        const auto& neighborhood = adj.next[static_cast<std::size_t>(v)];
        const std::size_t k = neighborhood.size();
        if (k < 2) continue;

        std::vector<char> allowed(static_cast<std::size_t>(n), 0);
        for (const auto& [u, len] : neighborhood) allowed[static_cast<std::size_t>(u)] = 1;

        double total = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            const auto dist = shortest_paths(adj, neighborhood[a].first, allowed);
            for (std::size_t b = a + 1; b < k; ++b) {
                const double d = dist[static_cast<std::size_t>(neighborhood[b].first)];
                if (std::isfinite(d) && d > 0.0) total += 1.0 / d;
            }
        }
        // Ordered-pair normalization 1/(k(k-1)); `total` holds each unordered
        // pair once, hence the factor 2.
        eff(v) = 2.0 * total / (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    return eff;
}

GraphIndexVector assemble_graph_features(const SparseNetwork& net) {
    GraphIndexVector g;
    g.degree = degree_centrality(net);
    g.strength = node_strength(net);
    g.local_efficiency = local_efficiency(net);
    g.betweenness = betweenness_centrality(net);
    g.flattened.resize(4 * net.n);
    g.flattened << g.degree, g.strength, g.local_efficiency, g.betweenness;
    return g;
}

std::vector<std::string> graph_feature_names(Eigen::Index n_rois) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(4 * n_rois));
    char buf[24];
    for (const char* prefix : {"deg_", "str_", "leff_", "btw_"}) {
        for (Eigen::Index i = 0; i < n_rois; ++i) {
            std::snprintf(buf, sizeof(buf), "%s%03lld", prefix, static_cast<long long>(i));
            names.emplace_back(buf);
        }
    }
    return names;
}

}  // namespace wena
