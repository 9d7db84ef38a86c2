#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace surfsim {

// Weighted graph over detection events. Every real node may carry one
// virtual boundary node (boundary_weight finite); boundary nodes are
// mutually connected at zero weight, so unpaired chains can terminate.
struct MatchingGraph {
    struct Edge {
        int u, v;
        double w;
    };
    int num_nodes = 0;
    std::vector<Edge> edges;
    std::vector<double> boundary_weight;  // per node; infinity = no boundary edge

    static constexpr double kNoBoundary = std::numeric_limits<double>::infinity();

    explicit MatchingGraph(int n = 0)
        : num_nodes(n), boundary_weight(n, kNoBoundary) {}

    void add_edge(int u, int v, double w) { edges.push_back({u, v, w}); }
    void set_boundary(int u, double w) { boundary_weight[u] = w; }
};

struct Matching {
    // pairs of real nodes; second == -1 means matched to own boundary.
    std::vector<std::pair<int, int>> pairs;
    double total_weight = 0.0;

    void canonicalize() {
        for (auto& pr : pairs)
            if (pr.second >= 0 && pr.second < pr.first) std::swap(pr.first, pr.second);
        std::sort(pairs.begin(), pairs.end());
    }
};

namespace detail {

// Maximum-weight matching in a general graph (Edmonds' blossom algorithm
// with shrink/expand over odd cycles), O(n^3). Integer weights; vertices
// are 1-based; zero weight marks an absent edge.
class WeightedBlossom {
public:
    explicit WeightedBlossom(int n) : n_(n) {
        int N = 2 * n + 1;
        g_.assign(N, std::vector<Edge>(N));
        for (int u = 0; u < N; ++u)
            for (int v = 0; v < N; ++v) g_[u][v] = {u, v, 0};
        lab_.assign(N, 0);
        match_.assign(N, 0);
        slack_.assign(N, 0);
        st_.assign(N, 0);
        pa_.assign(N, 0);
        S_.assign(N, 0);
        vis_.assign(N, 0);
        flower_.assign(N, {});
        flower_from_.assign(N, std::vector<int>(n + 1, 0));
    }

    void set_weight(int u, int v, int64_t w) {  // 1-based
        g_[u][v].w = g_[v][u].w = w;
    }

    // Runs the algorithm; returns (total weight, number of matched pairs).
    std::pair<int64_t, int> solve() {
        std::fill(match_.begin(), match_.begin() + n_ + 1, 0);
        n_x_ = n_;
        int n_matches = 0;
        int64_t tot = 0;
        for (int u = 0; u <= n_; ++u) {
            st_[u] = u;
            flower_[u].clear();
        }
        int64_t w_max = 0;
        for (int u = 1; u <= n_; ++u)
            for (int v = 1; v <= n_; ++v) {
                flower_from_[u][v] = (u == v ? u : 0);
                w_max = std::max(w_max, g_[u][v].w);
            }
        for (int u = 1; u <= n_; ++u) lab_[u] = w_max;
        while (matching()) ++n_matches;
        for (int u = 1; u <= n_; ++u)
            if (match_[u] && match_[u] < u) tot += g_[u][match_[u]].w;
        return {tot, n_matches};
    }

    int mate(int u) const { return match_[u]; }  // 0 = unmatched

private:
    struct Edge {
        int u, v;
        int64_t w;
    };

    int64_t e_delta(const Edge& e) const { return lab_[e.u] + lab_[e.v] - g_[e.u][e.v].w * 2; }

    void update_slack(int u, int x) {
        if (!slack_[x] || e_delta(g_[u][x]) < e_delta(g_[slack_[x]][x])) slack_[x] = u;
    }

    void set_slack(int x) {
        slack_[x] = 0;
        for (int u = 1; u <= n_; ++u)
            if (g_[u][x].w > 0 && st_[u] != x && S_[st_[u]] == 0) update_slack(u, x);
    }

    void q_push(int x) {
        if (x <= n_)
            q_.push_back(x);
        else
            for (int y : flower_[x]) q_push(y);
    }

    void set_st(int x, int b) {
        st_[x] = b;
        if (x > n_)
            for (int y : flower_[x]) set_st(y, b);
    }

    int get_pr(int b, int xr) {
        int pr = static_cast<int>(std::find(flower_[b].begin(), flower_[b].end(), xr) -
                                  flower_[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower_[b].begin() + 1, flower_[b].end());
            return static_cast<int>(flower_[b].size()) - pr;
        }
        return pr;
    }

    void set_match(int u, int v) {
        match_[u] = g_[u][v].v;
        if (u > n_) {
            Edge e = g_[u][v];
            int xr = flower_from_[u][e.u];
            int pr = get_pr(u, xr);
            for (int i = 0; i < pr; ++i) set_match(flower_[u][i], flower_[u][i ^ 1]);
            set_match(xr, v);
            std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
        }
    }

    void augment(int u, int v) {
        for (;;) {
            int xnv = st_[match_[u]];
            set_match(u, v);
            if (!xnv) return;
            set_match(xnv, st_[pa_[xnv]]);
            u = st_[pa_[xnv]];
            v = xnv;
        }
    }

    int get_lca(int u, int v) {
        ++timer_;
        for (; u || v; std::swap(u, v)) {
            if (u == 0) continue;
            if (vis_[u] == timer_) return u;
            vis_[u] = timer_;
            u = st_[match_[u]];
            if (u) u = st_[pa_[u]];
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n_ + 1;
        while (b <= n_x_ && st_[b]) ++b;
        if (b > n_x_) ++n_x_;
        lab_[b] = 0;
        S_[b] = 0;
        match_[b] = match_[lca];
        flower_[b].clear();
        flower_[b].push_back(lca);
        for (int x = u, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            flower_[b].push_back(y = st_[match_[x]]);
            q_push(y);
        }
        std::reverse(flower_[b].begin() + 1, flower_[b].end());
        for (int x = v, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            flower_[b].push_back(y = st_[match_[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x_; ++x) g_[b][x].w = g_[x][b].w = 0;
        for (int x = 1; x <= n_; ++x) flower_from_[b][x] = 0;
        for (int xs : flower_[b]) {
            for (int x = 1; x <= n_x_; ++x)
                if (g_[b][x].w == 0 || e_delta(g_[xs][x]) < e_delta(g_[b][x])) {
                    g_[b][x] = g_[xs][x];
                    g_[x][b] = g_[x][xs];
                }
            for (int x = 1; x <= n_; ++x)
                if (flower_from_[xs][x]) flower_from_[b][x] = xs;
        }
        set_slack(b);
    }

    void expand_blossom(int b) {
        for (int y : flower_[b]) set_st(y, y);
        int xr = flower_from_[b][g_[b][pa_[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower_[b][i], xns = flower_[b][i + 1];
            pa_[xs] = g_[xns][xs].u;
            S_[xs] = 1;
            S_[xns] = 0;
            slack_[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        S_[xr] = 1;
        pa_[xr] = pa_[b];
        for (size_t i = pr + 1; i < flower_[b].size(); ++i) {
            int xs = flower_[b][i];
            S_[xs] = -1;
            set_slack(xs);
        }
        st_[b] = 0;
    }

    bool on_found_edge(const Edge& e) {
        int u = st_[e.u], v = st_[e.v];
        if (S_[v] == -1) {
            pa_[v] = e.u;
            S_[v] = 1;
            int nu = st_[match_[v]];
            slack_[v] = slack_[nu] = 0;
            S_[nu] = 0;
            q_push(nu);
        } else if (S_[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    bool matching() {
        std::fill(S_.begin(), S_.begin() + n_x_ + 1, -1);
        std::fill(slack_.begin(), slack_.begin() + n_x_ + 1, 0);
        q_.clear();
        for (int x = 1; x <= n_x_; ++x)
            if (st_[x] == x && !match_[x]) {
                pa_[x] = 0;
                S_[x] = 0;
                q_push(x);
            }
        if (q_.empty()) return false;
        for (;;) {
            while (!q_.empty()) {
                int u = q_.front();
                q_.pop_front();
                if (S_[st_[u]] == 1) continue;
                for (int v = 1; v <= n_; ++v)
                    if (g_[u][v].w > 0 && st_[u] != st_[v]) {
                        if (e_delta(g_[u][v]) == 0) {
                            if (on_found_edge(g_[u][v])) return true;
                        } else {
                            update_slack(u, st_[v]);
                        }
                    }
            }
            int64_t d = std::numeric_limits<int64_t>::max();
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b && S_[b] == 1) d = std::min(d, lab_[b] / 2);
            for (int x = 1; x <= n_x_; ++x)
                if (st_[x] == x && slack_[x]) {
                    if (S_[x] == -1)
                        d = std::min(d, e_delta(g_[slack_[x]][x]));
                    else if (S_[x] == 0)
                        d = std::min(d, e_delta(g_[slack_[x]][x]) / 2);
                }
            for (int u = 1; u <= n_; ++u) {
                if (S_[st_[u]] == 0) {
                    if (lab_[u] <= d) return false;
                    lab_[u] -= d;
                } else if (S_[st_[u]] == 1) {
                    lab_[u] += d;
                }
            }
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b) {
                    if (S_[b] == 0)
                        lab_[b] += d * 2;
                    else if (S_[b] == 1)
                        lab_[b] -= d * 2;
                }
            q_.clear();
            for (int x = 1; x <= n_x_; ++x)
                if (st_[x] == x && slack_[x] && st_[slack_[x]] != x &&
                    e_delta(g_[slack_[x]][x]) == 0)
                    if (on_found_edge(g_[slack_[x]][x])) return true;
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b && S_[b] == 1 && lab_[b] == 0) expand_blossom(b);
        }
    }

    int n_, n_x_ = 0;
    int timer_ = 0;
    std::vector<std::vector<Edge>> g_;
    std::vector<int64_t> lab_;
    std::vector<int> match_, slack_, st_, pa_, S_, vis_;
    std::vector<std::vector<int>> flower_, flower_from_;
    std::deque<int> q_;
};

constexpr double kWeightScale = 4294967296.0;  // 2^32

}  // namespace detail

// Exact minimum-weight perfect matching via the blossom algorithm.
// Weights are scaled to 64-bit integers; the returned total weight is the
// sum of the original double weights of the chosen pairs.
inline Matching min_weight_perfect_matching(const MatchingGraph& G) {
    int n = G.num_nodes;
    int nb = 0;
    std::vector<int> bnode(n, -1);  // blossom vertex id of node's boundary
    for (int i = 0; i < n; ++i)
        if (G.boundary_weight[i] != MatchingGraph::kNoBoundary) bnode[i] = n + nb++;
    int total = n + nb;
    if (total % 2 != 0)
        throw std::invalid_argument("min_weight_perfect_matching: odd node count");
    Matching M;
    if (total == 0) return M;

    // Convert min-weight to max-weight: w' = big - w, with big large enough
    // that more edges always beat fewer (forcing a perfect matching when
    // one exists).
    int64_t max_w = 1;
    auto scaled = [](double w) {
        return static_cast<int64_t>(std::llround(w * detail::kWeightScale));
    };
    for (const auto& e : G.edges) max_w = std::max(max_w, scaled(e.w));
    for (int i = 0; i < n; ++i)
        if (bnode[i] >= 0) max_w = std::max(max_w, scaled(G.boundary_weight[i]));
    const int64_t big = max_w * (total + 1) + 1;

    // Collapse parallel edges to their minimum weight up front.
    std::vector<std::vector<double>> wmat(n, std::vector<double>(n, -1.0));
    for (const auto& e : G.edges)
        if (e.u != e.v && (wmat[e.u][e.v] < 0 || e.w < wmat[e.u][e.v]))
            wmat[e.u][e.v] = wmat[e.v][e.u] = e.w;

    detail::WeightedBlossom B(total);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (wmat[i][j] >= 0) B.set_weight(i + 1, j + 1, big - scaled(wmat[i][j]));
    for (int i = 0; i < n; ++i)
        if (bnode[i] >= 0) B.set_weight(i + 1, bnode[i] + 1, big - scaled(G.boundary_weight[i]));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (bnode[i] >= 0 && bnode[j] >= 0) B.set_weight(bnode[i] + 1, bnode[j] + 1, big);

    auto [tot, pairs] = B.solve();
    (void)tot;
    if (pairs * 2 != total)
        throw std::invalid_argument("min_weight_perfect_matching: no perfect matching");

    for (int i = 0; i < n; ++i) {
        int m = B.mate(i + 1) - 1;
        if (m > i && m < n) {
            M.pairs.push_back({i, m});
            M.total_weight += wmat[i][m];
        } else if (m == bnode[i]) {
            M.pairs.push_back({i, -1});
            M.total_weight += G.boundary_weight[i];
        }
    }
    M.canonicalize();
    return M;
}

// Exhaustive oracle: minimum over all perfect matchings with lexicographic
// tie-breaking on the sorted pair list. Real nodes only, <= 12.
inline Matching brute_force_matching(const MatchingGraph& G) {
    int n = G.num_nodes;
    if (n > 12) throw std::invalid_argument("brute_force_matching: > 12 nodes");
    std::vector<std::vector<double>> w(n, std::vector<double>(n, -1.0));
    for (const auto& e : G.edges)
        if (e.u != e.v && (w[e.u][e.v] < 0 || e.w < w[e.u][e.v]))
            w[e.u][e.v] = w[e.v][e.u] = e.w;

    Matching best;
    bool found = false;
    std::vector<int> mate(n, -2);  // -2 unassigned, -1 boundary
    std::vector<std::pair<int, int>> cur;

    auto better = [&](double cand_w, const std::vector<std::pair<int, int>>& cand) {
        if (!found) return true;
        if (cand_w != best.total_weight) return cand_w < best.total_weight;
        return cand < best.pairs;
    };

    std::function<void(int, double)> rec = [&](int i, double acc) {
        while (i < n && mate[i] != -2) ++i;
        if (i == n) {
            auto sorted = cur;
            std::sort(sorted.begin(), sorted.end());
            if (better(acc, sorted)) {
                best.pairs = sorted;
                best.total_weight = acc;
                found = true;
            }
            return;
        }
        if (G.boundary_weight[i] != MatchingGraph::kNoBoundary) {
            mate[i] = -1;
            cur.push_back({i, -1});
            rec(i + 1, acc + G.boundary_weight[i]);
            cur.pop_back();
            mate[i] = -2;
        }
        for (int j = i + 1; j < n; ++j)
            if (mate[j] == -2 && w[i][j] >= 0) {
                mate[i] = j;
                mate[j] = i;
                cur.push_back({i, j});
                rec(i + 1, acc + w[i][j]);
                cur.pop_back();
                mate[i] = mate[j] = -2;
            }
    };
    rec(0, 0.0);
    if (!found) throw std::invalid_argument("brute_force_matching: no perfect matching");
    return best;
}

}  // namespace surfsim
