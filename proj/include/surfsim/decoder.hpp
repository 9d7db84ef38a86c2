#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <queue>
#include <stdexcept>
#include <vector>

#include "surfsim/lattice.hpp"
#include "surfsim/matcher.hpp"
#include "surfsim/noise.hpp"
#include "surfsim/pauli_sim.hpp"
#include "surfsim/schedule.hpp"
#include "surfsim/weights.hpp"

namespace surfsim {

struct Correction {
    std::vector<uint8_t> x_flips;  // per data qubit
    std::vector<uint8_t> z_flips;
};

struct TrialOutcome {
    bool failure_x = false;
    bool failure_z = false;
    int rounds_simulated = 0;
};

// Space-time graph for one decoding component: nodes (round t, stabilizer s)
// for t in 0..rounds, plus a virtual boundary. Edge classes from the weight
// table are instantiated at every valid time offset, and all-pairs shortest
// paths are precomputed so per-trial decoding reduces to table lookups.
class DecodingGraph {
public:
    DecodingGraph(const CodeLayout& L, const EdgeWeightTable& T, PauliType graph, int rounds)
        : graph_(graph), rounds_(rounds), ns_(L.num_stabs(graph)) {
        const int N = num_nodes();
        adj_.assign(N, {});
        boundary_w_.assign(N, std::numeric_limits<double>::infinity());
        boundary_flips_.assign(N, {});

        for (size_t ci = 0; ci < T.classes.size(); ++ci) {
            const EdgeClass& c = T.classes[ci];
            if (c.graph != graph) continue;
            if (c.s_b < 0) {
                for (int t = 0; t <= rounds_; ++t) {
                    int u = node(t, c.s_a);
                    if (c.w_e < boundary_w_[u]) {
                        boundary_w_[u] = c.w_e;
                        boundary_flips_[u] = c.flips;
                    }
                }
            } else {
                for (int t = 0; t + c.dt <= rounds_; ++t) {
                    int u = node(t, c.s_a), v = node(t + c.dt, c.s_b);
                    add_edge(u, v, c.w_e, c.flips);
                }
            }
        }
        compute_paths();
    }

    int node(int t, int s) const { return t * ns_ + s; }
    int num_nodes() const { return (rounds_ + 1) * ns_; }
    PauliType graph_type() const { return graph_; }

    double distance(int u, int v) const { return dist_[u][v]; }
    double boundary_distance(int u) const { return bdist_[u]; }

    // XORs the data-qubit flips along the shortest u-v path into `corr`.
    void apply_path(int u, int v, std::vector<uint8_t>& corr) const {
        while (v != u) {
            int p = par_[u][v];
            xor_edge_flips(p, v, corr);
            v = p;
        }
    }

    // Path from u out through its cheapest boundary exit.
    void apply_boundary_path(int u, std::vector<uint8_t>& corr) const {
        int v = u;
        while (bpar_[v] != -1) {
            int p = bpar_[v];
            xor_edge_flips(p, v, corr);
            v = p;
        }
        for (int q : boundary_flips_[v]) corr[q] ^= 1;
    }

private:
    struct Arc {
        int to;
        double w;
        const std::vector<int>* flips;
    };

    void add_edge(int u, int v, double w, const std::vector<int>& flips) {
        // Parallel edges can only come from duplicate table rows; keep the lighter.
        for (auto& a : adj_[u])
            if (a.to == v) {
                if (w < a.w) {
                    a.w = w;
                    a.flips = &flips;
                    for (auto& b : adj_[v])
                        if (b.to == u) {
                            b.w = w;
                            b.flips = &flips;
                        }
                }
                return;
            }
        adj_[u].push_back({v, w, &flips});
        adj_[v].push_back({u, w, &flips});
    }

    void xor_edge_flips(int a, int b, std::vector<uint8_t>& corr) const {
        for (const auto& arc : adj_[a])
            if (arc.to == b) {
                for (int q : *arc.flips) corr[q] ^= 1;
                return;
            }
        throw std::logic_error("DecodingGraph: path step without edge");
    }

    void compute_paths() {
        const int N = num_nodes();
        const double inf = std::numeric_limits<double>::infinity();
        dist_.assign(N, std::vector<double>(N, inf));
        par_.assign(N, std::vector<int32_t>(N, -1));
        using QE = std::pair<double, int>;
        for (int src = 0; src < N; ++src) {
            auto& d = dist_[src];
            auto& par = par_[src];
            std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
            d[src] = 0.0;
            pq.push({0.0, src});
            while (!pq.empty()) {
                auto [du, u] = pq.top();
                pq.pop();
                if (du > d[u]) continue;
                for (const auto& a : adj_[u]) {
                    double nd = du + a.w;
                    if (nd < d[a.to]) {
                        d[a.to] = nd;
                        par[a.to] = u;
                        pq.push({nd, a.to});
                    }
                }
            }
        }
        // Single Dijkstra from the virtual boundary.
        bdist_.assign(N, inf);
        bpar_.assign(N, -1);
        std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
        for (int u = 0; u < N; ++u)
            if (boundary_w_[u] < inf) {
                bdist_[u] = boundary_w_[u];
                pq.push({bdist_[u], u});
            }
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > bdist_[u]) continue;
            for (const auto& a : adj_[u]) {
                double nd = du + a.w;
                if (nd < bdist_[a.to]) {
                    bdist_[a.to] = nd;
                    bpar_[a.to] = u;
                    pq.push({nd, a.to});
                }
            }
        }
    }

    PauliType graph_;
    int rounds_, ns_;
    std::vector<std::vector<Arc>> adj_;
    std::vector<double> boundary_w_;
    std::vector<std::vector<int>> boundary_flips_;
    std::vector<std::vector<double>> dist_;
    std::vector<std::vector<int32_t>> par_;
    std::vector<double> bdist_;
    std::vector<int32_t> bpar_;
};

// Everything fixed across the trials of one sweep point.
struct DecoderContext {
    const CodeLayout* layout = nullptr;
    const CircuitSchedule* schedule = nullptr;  // null for capacity/pheno
    NoiseModel model;
    EdgeWeightTable table;
    int rounds = 0;  // noisy rounds per trial (0 for code capacity)
    std::unique_ptr<DecodingGraph> gx, gz;  // X-stab graph, Z-stab graph
    // Real-real matching edges are restricted to pairs within this
    // space-time shortest-path radius; infinity = complete graph.
    double match_radius = std::numeric_limits<double>::infinity();
    // X and Z decode independently; sweeps tracking one logical component
    // can skip the other half of the work.
    bool decode_x = true, decode_z = true;

    DecoderContext() = default;

    static DecoderContext make(const CodeLayout& L, const CircuitSchedule* S,
                               const NoiseModel& m, const EdgeWeightTable& T, int rounds) {
        DecoderContext ctx;
        ctx.layout = &L;
        ctx.schedule = S;
        ctx.model = m;
        ctx.table = T;
        ctx.rounds = rounds;
        int event_rounds = m.kind == NoiseKind::CODE_CAPACITY ? 0 : rounds;
        ctx.gx = std::make_unique<DecodingGraph>(L, ctx.table, PauliType::X, event_rounds);
        ctx.gz = std::make_unique<DecodingGraph>(L, ctx.table, PauliType::Z, event_rounds);
        return ctx;
    }
};

// Matches the events of one graph and XORs the implied corrections.
inline void decode_component(const DecodingGraph& G, const CodeLayout& L,
                             const std::vector<DetectionEvent>& events,
                             double match_radius, std::vector<uint8_t>& corr) {
    const int n = static_cast<int>(events.size());
    if (n == 0) return;
    std::vector<int> nodes(n);
    for (int i = 0; i < n; ++i) {
        int local = G.graph_type() == PauliType::X ? events[i].stab
                                                   : events[i].stab - L.num_x_stabs();
        nodes[i] = G.node(events[i].round, local);
    }
    MatchingGraph MG(n);
    for (int i = 0; i < n; ++i) MG.set_boundary(i, G.boundary_distance(nodes[i]));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = G.distance(nodes[i], nodes[j]);
            if (std::isfinite(d) && d <= match_radius) MG.add_edge(i, j, d);
        }
    auto M = min_weight_perfect_matching(MG);
    for (const auto& [a, b] : M.pairs) {
        if (b < 0)
            G.apply_boundary_path(nodes[a], corr);
        else
            G.apply_path(nodes[a], nodes[b], corr);
    }
}

// Turns a matching into per-qubit flips for both components.
inline Correction matching_to_correction(const DecoderContext& ctx,
                                         const DetectionEventSet& ev) {
    const CodeLayout& L = *ctx.layout;
    Correction corr;
    corr.x_flips.assign(L.num_data(), 0);
    corr.z_flips.assign(L.num_data(), 0);
    std::vector<DetectionEvent> ex, ez;
    for (const auto& e : ev.events)
        (e.stab < L.num_x_stabs() ? ex : ez).push_back(e);
    // Z-stab events witness X errors, X-stab events witness Z errors.
    if (ctx.decode_x) decode_component(*ctx.gz, L, ez, ctx.match_radius, corr.x_flips);
    if (ctx.decode_z) decode_component(*ctx.gx, L, ex, ctx.match_radius, corr.z_flips);
    return corr;
}

// Homology test: did correction + residual implement a logical operator?
inline TrialOutcome logical_failure(const CodeLayout& L, const std::vector<uint8_t>& residual,
                                    const Correction& corr, bool check_neutral = true,
                                    bool eval_x = true, bool eval_z = true) {
    std::vector<uint8_t> net(L.num_data(), 0);
    TrialOutcome out;
    if (eval_x) {
        for (int q = 0; q < L.num_data(); ++q)
            net[q] = static_cast<uint8_t>((residual[q] & 1) ^ corr.x_flips[q]);
        if (check_neutral)
            for (const auto& s : L.z_stabilizers) {
                uint8_t p = 0;
                for (int q : s.support) p ^= net[q];
                if (p) throw std::logic_error("logical_failure: X syndrome not neutralized");
            }
        for (int q : L.logical_z_support) out.failure_x ^= net[q];
    }
    if (eval_z) {
        for (int q = 0; q < L.num_data(); ++q)
            net[q] = static_cast<uint8_t>(((residual[q] >> 1) & 1) ^ corr.z_flips[q]);
        if (check_neutral)
            for (const auto& s : L.x_stabilizers) {
                uint8_t p = 0;
                for (int q : s.support) p ^= net[q];
                if (p) throw std::logic_error("logical_failure: Z syndrome not neutralized");
            }
        for (int q : L.logical_x_support) out.failure_z ^= net[q];
    }
    return out;
}

// Full pipeline for one trial with a pre-sampled history.
inline TrialOutcome decode_history(const DecoderContext& ctx, const SyndromeHistory& h,
                                   bool check_neutral = true) {
    auto ev = detection_events(h);
    auto corr = matching_to_correction(ctx, ev);
    auto out = logical_failure(*ctx.layout, h.residual, corr, check_neutral,
                               ctx.decode_x, ctx.decode_z);
    out.rounds_simulated = ctx.rounds;
    return out;
}

// Samples noise, simulates, decodes. `check_neutral` is sampled by callers
// in release-style loops.
inline TrialOutcome decode_trial(const DecoderContext& ctx, Rng& rng,
                                 bool check_neutral = true) {
    const CodeLayout& L = *ctx.layout;
    SyndromeHistory h;
    switch (ctx.model.kind) {
        case NoiseKind::CODE_CAPACITY:
            h = simulate_code_capacity(L, sample_code_capacity(L, ctx.model.p, rng));
            break;
        case NoiseKind::PHENOMENOLOGICAL:
            h = simulate_phenomenological(
                L, sample_phenomenological(L, ctx.model.p, ctx.rounds, rng));
            break;
        default:
            h = run_rounds(L, *ctx.schedule, ctx.model, ctx.rounds, rng);
            break;
    }
    return decode_history(ctx, h, check_neutral);
}

}  // namespace surfsim
