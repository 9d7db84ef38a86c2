#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "surfsim/lattice.hpp"
#include "surfsim/noise.hpp"
#include "surfsim/pauli_sim.hpp"
#include "surfsim/schedule.hpp"

namespace surfsim {

// One translation-invariant (in time) edge class of a decoding graph.
// Stabilizer indices are local to the graph's type; s_b == -1 marks a
// boundary edge. `flips` is the data-qubit correction associated with
// traversing the edge (X corrections on the Z graph, Z on the X graph).
struct EdgeClass {
    PauliType graph = PauliType::Z;
    int s_a = -1, s_b = -1;
    int dt = 0;              // round offset of b relative to a (>= 0)
    double p_e = 0.0;        // 0 for metric-only (rectilinear) tables
    double w_e = 0.0;
    std::vector<int> flips;
};

struct EdgeWeightTable {
    std::vector<EdgeClass> classes;
    bool rectilinear = false;
};

inline double llr_weight(double p) { return std::log((1.0 - p) / p); }

// Independent-OR (odd parity) combination of two mechanism probabilities.
inline double xor_combine(double p, double q) { return p * (1.0 - q) + q * (1.0 - p); }

namespace detail {

struct ClassKey {
    PauliType graph;
    int s_a, s_b, dt;
    bool operator<(const ClassKey& o) const {
        return std::tie(graph, s_a, s_b, dt) < std::tie(o.graph, o.s_a, o.s_b, o.dt);
    }
};

struct ClassAccum {
    double p = 0.0;
    std::vector<int> flips;
    int logical_parity = -1;
    bool have_flips = false;
};

// All fault mechanisms at one gate location, with probabilities.
inline std::vector<std::pair<FaultEvent, double>> location_mechanisms(
    const CircuitSchedule& S, const NoiseModel& m, int gate_index, int round) {
    std::vector<std::pair<FaultEvent, double>> out;
    const GateLocation& g = S.gates[gate_index];
    FaultEvent base;
    base.gate_index = gate_index;
    base.round = round;
    switch (g.kind) {
        case GateKind::CNOT:
            if (m.p_2q > 0)
                for (int pp = 1; pp < 16; ++pp) {
                    FaultEvent f = base;
                    f.p0 = pp & 3;
                    f.p1 = (pp >> 2) & 3;
                    out.push_back({f, m.p_2q / 15.0});
                }
            break;
        case GateKind::HADAMARD:
        case GateKind::IDLE: {
            double pr = m.location_prob(g.kind);
            if (pr > 0)
                for (uint8_t p = 1; p <= 3; ++p) {
                    FaultEvent f = base;
                    f.p0 = p;
                    out.push_back({f, pr / 3.0});
                }
            break;
        }
        case GateKind::PREP_Z:
        case GateKind::PREP_X:
            if (m.p_prep > 0) {
                FaultEvent f = base;
                f.p0 = prep_fault_pauli(g.kind);
                out.push_back({f, m.p_prep});
            }
            break;
        case GateKind::MEAS_Z:
        case GateKind::MEAS_X:
            if (m.p_meas > 0) {
                FaultEvent f = base;
                f.meas_flip = true;
                out.push_back({f, m.p_meas});
            }
            if (g.fused_prep && m.p_prep > 0) {
                FaultEvent f = base;
                f.p0 = prep_fault_pauli(g.kind);
                out.push_back({f, m.p_prep});
            }
            break;
    }
    return out;
}

}  // namespace detail

// Derives the matching-graph edge classes for a circuit-level model by
// propagating every possible single fault through the schedule. Each
// mechanism must produce at most two detection events per decoding graph;
// anything else indicates a schedule bug and fails loudly.
inline EdgeWeightTable derive_circuit_weights(const CodeLayout& L, const CircuitSchedule& S,
                                              const NoiseModel& m) {
    // Fault goes in round 1. Most mechanisms settle within two rounds, but a
    // fused prep fault acts on the *next* round's extraction and can light up
    // rounds 2 and 3, so give the window one extra round of slack.
    const int kRounds = 5;
    const int kFaultRound = 1;
    std::map<detail::ClassKey, detail::ClassAccum> acc;

    auto process = [&](const FaultEvent& f, double prob) {
        auto h = run_with_faults(L, S, kRounds, {f});
        auto ev = detection_events(h);
        for (auto graph : {PauliType::X, PauliType::Z}) {
            std::vector<std::pair<int, int>> evs;  // (round, local stab)
            for (const auto& e : ev.events) {
                bool is_x = e.stab < L.num_x_stabs();
                if ((graph == PauliType::X) != is_x) continue;
                int local = is_x ? e.stab : e.stab - L.num_x_stabs();
                if (e.round < kFaultRound || e.round > kFaultRound + 2)
                    throw std::logic_error("derive_weights: event outside fault window");
                evs.push_back({e.round, local});
            }
            // Residual component relevant to this graph.
            std::vector<int> flips;
            const std::vector<int>& logical =
                graph == PauliType::Z ? L.logical_z_support : L.logical_x_support;
            int shift = graph == PauliType::Z ? 0 : 1;  // Z graph tracks X flips
            for (int q = 0; q < L.num_data(); ++q)
                if ((h.residual[q] >> shift) & 1) flips.push_back(q);

            if (evs.size() > 2)
                throw std::logic_error("derive_weights: single fault produced " +
                                       std::to_string(evs.size()) + " events in one graph");
            int parity = 0;
            for (int q : logical) parity ^= std::count(flips.begin(), flips.end(), q) & 1;
            if (evs.empty()) {
                // No events means the residual has trivial syndrome; it is
                // only acceptable if it is a stabilizer (e.g. an ancilla X
                // fault that copies the full plaquette onto the data), not a
                // logical operator.
                if (parity)
                    throw std::logic_error("derive_weights: undetected logical fault");
                continue;
            }
            detail::ClassKey key{graph, -1, -1, 0};
            if (evs.size() == 1) {
                key.s_a = evs[0].second;
            } else {
                std::sort(evs.begin(), evs.end());
                key.dt = evs[1].first - evs[0].first;
                key.s_a = evs[0].second;
                key.s_b = evs[1].second;
                if (key.dt == 0 && key.s_a > key.s_b) std::swap(key.s_a, key.s_b);
            }
            auto& a = acc[key];
            if (a.have_flips) {
                if (a.logical_parity != parity)
                    throw std::logic_error(
                        "derive_weights: inconsistent homology within edge class");
            } else {
                a.flips = flips;
                a.logical_parity = parity;
                a.have_flips = true;
            }
            a.p = xor_combine(a.p, prob);
        }
    };

    for (size_t i = 0; i < S.gates.size(); ++i)
        for (const auto& [f, prob] : detail::location_mechanisms(S, m, static_cast<int>(i),
                                                                 kFaultRound))
            process(f, prob);

    EdgeWeightTable T;
    for (auto& [key, a] : acc) {
        if (a.p <= 0.0) continue;
        EdgeClass c;
        c.graph = key.graph;
        c.s_a = key.s_a;
        c.s_b = key.s_b;
        c.dt = key.dt;
        c.p_e = a.p;
        c.w_e = llr_weight(a.p);
        c.flips = std::move(a.flips);
        T.classes.push_back(std::move(c));
    }
    return T;
}

// Closed-form tables for the simplified models: data errors give spatial
// edges at probability p; phenomenological report flips add temporal edges
// at probability p. No diagonal edges.
inline EdgeWeightTable derive_simple_weights(const CodeLayout& L, NoiseKind kind, double p) {
    EdgeWeightTable T;
    for (auto graph : {PauliType::X, PauliType::Z}) {
        PauliType stab_type = graph;
        for (int q = 0; q < L.num_data(); ++q) {
            std::vector<int> stabs;
            for (int i = 0; i < L.num_stabs(stab_type); ++i) {
                const auto& s = L.stab(stab_type, i);
                if (std::count(s.support.begin(), s.support.end(), q)) stabs.push_back(i);
            }
            EdgeClass c;
            c.graph = graph;
            c.dt = 0;
            c.p_e = p;
            c.w_e = llr_weight(p);
            c.flips = {q};
            if (stabs.size() == 2) {
                c.s_a = std::min(stabs[0], stabs[1]);
                c.s_b = std::max(stabs[0], stabs[1]);
            } else if (stabs.size() == 1) {
                c.s_a = stabs[0];
                c.s_b = -1;
            } else {
                continue;  // corner qubits of tiny codes may touch no stab of a type
            }
            T.classes.push_back(c);
        }
        if (kind == NoiseKind::PHENOMENOLOGICAL)
            for (int i = 0; i < L.num_stabs(stab_type); ++i) {
                EdgeClass c;
                c.graph = graph;
                c.s_a = i;
                c.s_b = i;
                c.dt = 1;
                c.p_e = p;
                c.w_e = llr_weight(p);
                T.classes.push_back(c);
            }
    }
    return T;
}

inline EdgeWeightTable derive_weights(const CodeLayout& L, const CircuitSchedule& S,
                                      const NoiseModel& m) {
    if (m.is_circuit_level()) return derive_circuit_weights(L, S, m);
    return derive_simple_weights(L, m.kind, m.p);
}

// Rectilinear metric: unit-weight temporal and spatial steps, boundary
// edges at the rectilinear distance to the nearest boundary of the right
// kind. Corrections still need data flips, so spatial steps carry the
// shared qubit and boundary edges carry the straight chain out.
inline EdgeWeightTable rectilinear_weights(const CodeLayout& L) {
    EdgeWeightTable T;
    T.rectilinear = true;
    const int n = 2 * L.distance - 1;
    for (auto graph : {PauliType::X, PauliType::Z}) {
        PauliType stab_type = graph;
        const int ns = L.num_stabs(stab_type);
        // Temporal unit edges.
        for (int i = 0; i < ns; ++i) {
            EdgeClass c;
            c.graph = graph;
            c.s_a = i;
            c.s_b = i;
            c.dt = 1;
            c.w_e = 1.0;
            T.classes.push_back(c);
        }
        // Spatial unit edges between stabilizers sharing a data qubit.
        std::map<std::pair<int, int>, int> by_coord;
        for (int i = 0; i < ns; ++i)
            by_coord[{L.stab(stab_type, i).row, L.stab(stab_type, i).col}] = i;
        for (int i = 0; i < ns; ++i) {
            const auto& s = L.stab(stab_type, i);
            for (auto [dr, dc] : {std::pair{2, 0}, {0, 2}}) {
                auto it = by_coord.find({s.row + dr, s.col + dc});
                if (it == by_coord.end()) continue;
                int q = L.data_index(s.row + dr / 2, s.col + dc / 2);
                EdgeClass c;
                c.graph = graph;
                c.s_a = i;
                c.s_b = it->second;
                c.dt = 0;
                c.w_e = 1.0;
                c.flips = {q};
                T.classes.push_back(c);
            }
        }
        // Boundary edges. Z-stab chains exit through the top/bottom rows,
        // X-stab chains through the left/right columns.
        for (int i = 0; i < ns; ++i) {
            const auto& s = L.stab(stab_type, i);
            int coord = graph == PauliType::Z ? s.row : s.col;
            int up = (coord + 1) / 2;
            int down = (n - coord) / 2;
            EdgeClass c;
            c.graph = graph;
            c.s_a = i;
            c.s_b = -1;
            c.w_e = std::min(up, down);
            int step = up <= down ? -1 : 1;
            for (int k = 0; k < static_cast<int>(c.w_e); ++k) {
                int off = coord + step * (2 * k + 1);
                int q = graph == PauliType::Z ? L.data_index(off, s.col)
                                              : L.data_index(s.row, off);
                c.flips.push_back(q);
            }
            T.classes.push_back(c);
        }
    }
    return T;
}

// CSV dump for golden-file regression tests. Boundary rows use type
// "boundary" and leave ds blank-equivalent zeros relative to the anchor.
inline void dump_weights_csv(const CodeLayout& L, const EdgeWeightTable& T, std::ostream& os) {
    os << "graph,type,dt,ds_row,ds_col,p_e,w_e\n";
    struct Row {
        char g;
        std::string type;
        int dt, dr, dc;
        double p, w;
        bool operator<(const Row& o) const {
            return std::tie(g, type, dt, dr, dc, p) < std::tie(o.g, o.type, o.dt, o.dr, o.dc, o.p);
        }
    };
    std::vector<Row> rows;
    for (const auto& c : T.classes) {
        const auto& sa = c.graph == PauliType::X ? L.x_stabilizers[c.s_a]
                                                 : L.z_stabilizers[c.s_a];
        Row r;
        r.g = c.graph == PauliType::X ? 'X' : 'Z';
        r.dt = c.dt;
        r.p = c.p_e;
        r.w = c.w_e;
        if (c.s_b < 0) {
            r.type = "boundary";
            r.dr = r.dc = 0;
        } else {
            const auto& sb = c.graph == PauliType::X ? L.x_stabilizers[c.s_b]
                                                     : L.z_stabilizers[c.s_b];
            r.type = "edge";
            r.dr = sb.row - sa.row;
            r.dc = sb.col - sa.col;
        }
        rows.push_back(r);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const Row& a, const Row& b) {
                               return a.g == b.g && a.type == b.type && a.dt == b.dt &&
                                      a.dr == b.dr && a.dc == b.dc && a.p == b.p;
                           }),
               rows.end());
    for (const auto& r : rows)
        os << r.g << "," << r.type << "," << r.dt << "," << r.dr << "," << r.dc << ","
           << r.p << "," << r.w << "\n";
}

}  // namespace surfsim
