#pragma once

#include <algorithm>
#include <cassert>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "surfsim/lattice.hpp"

namespace surfsim {

enum class GateKind { PREP_Z, PREP_X, HADAMARD, CNOT, MEAS_Z, MEAS_X, IDLE };

inline const char* gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::PREP_Z: return "PREP_Z";
        case GateKind::PREP_X: return "PREP_X";
        case GateKind::HADAMARD: return "H";
        case GateKind::CNOT: return "CNOT";
        case GateKind::MEAS_Z: return "MEAS_Z";
        case GateKind::MEAS_X: return "MEAS_X";
        case GateKind::IDLE: return "IDLE";
    }
    return "?";
}

struct GateLocation {
    int time_step = 0;
    GateKind kind = GateKind::IDLE;
    int q0 = -1;        // control for CNOT
    int q1 = -1;        // target for CNOT, else -1
    // For measurement gates: which stabilizer's syndrome this outcome feeds.
    PauliType stab_type = PauliType::X;
    int stab_index = -1;
    // Depth-5 fused measurement: the same location also re-prepares the
    // ancilla, carrying an independent preparation fault channel.
    bool fused_prep = false;
};

enum class Variant { DEPTH8, DEPTH6, DEPTH5 };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::DEPTH8: return "depth8";
        case Variant::DEPTH6: return "depth6";
        case Variant::DEPTH5: return "depth5";
    }
    return "?";
}

struct CircuitSchedule {
    Variant variant = Variant::DEPTH6;
    int depth = 6;
    std::vector<GateLocation> gates;        // one full round, sorted by (t, q0)
    std::vector<GateLocation> round0_prep;  // explicit preps before round 0 (DEPTH5)
    std::vector<std::vector<int>> by_step;  // gate indices per time step

    void index_steps() {
        by_step.assign(depth, {});
        for (size_t i = 0; i < gates.size(); ++i)
            by_step[gates[i].time_step].push_back(static_cast<int>(i));
    }
};

// CNOT slot orderings. Z stabilizers interact (N, W, E, S); X stabilizers
// interact (N, E, W, S). With the layout's slot geometry this is a
// conflict-free interleaving: at every CNOT step the gates form a partial
// matching on qubits.
inline constexpr NeighborSlot kOrderX[4] = {NORTH, EAST, WEST, SOUTH};
inline constexpr NeighborSlot kOrderZ[4] = {NORTH, WEST, EAST, SOUTH};

inline CircuitSchedule build_schedule(const CodeLayout& L, Variant variant) {
    CircuitSchedule S;
    S.variant = variant;
    S.depth = variant == Variant::DEPTH8 ? 8 : variant == Variant::DEPTH6 ? 6 : 5;

    // cnot_t0: time step of the first CNOT slot.
    const int cnot_t0 = variant == Variant::DEPTH8 ? 2 : variant == Variant::DEPTH6 ? 1 : 0;

    std::vector<GateLocation>& gs = S.gates;
    auto add = [&](int t, GateKind k, int q0, int q1 = -1) {
        GateLocation g;
        g.time_step = t;
        g.kind = k;
        g.q0 = q0;
        g.q1 = q1;
        gs.push_back(g);
    };

    auto add_cnots = [&](PauliType type) {
        const NeighborSlot* order = type == PauliType::X ? kOrderX : kOrderZ;
        for (int i = 0; i < L.num_stabs(type); ++i) {
            const Stabilizer& st = L.stab(type, i);
            int a = type == PauliType::X ? L.x_ancilla(i) : L.z_ancilla(i);
            for (int k = 0; k < 4; ++k) {
                int q = st.neighbor[order[k]];
                if (q < 0) continue;
                if (type == PauliType::X)
                    add(cnot_t0 + k, GateKind::CNOT, a, q);  // ancilla controls
                else
                    add(cnot_t0 + k, GateKind::CNOT, q, a);  // ancilla is target
            }
        }
    };

    auto add_meas = [&](int t, GateKind k, PauliType type, int i, bool fused) {
        GateLocation g;
        g.time_step = t;
        g.kind = k;
        g.q0 = type == PauliType::X ? L.x_ancilla(i) : L.z_ancilla(i);
        g.stab_type = type;
        g.stab_index = i;
        g.fused_prep = fused;
        gs.push_back(g);
    };

    switch (variant) {
        case Variant::DEPTH8:
            // X circuit: prep |0>, H, 4 CNOTs, H, measure Z (8 steps).
            // Z circuit: 6 active steps flanked by idles at t=0 and t=7 so
            // the CNOT cores of both circuits line up.
            for (int i = 0; i < L.num_x_stabs(); ++i) {
                add(0, GateKind::PREP_Z, L.x_ancilla(i));
                add(1, GateKind::HADAMARD, L.x_ancilla(i));
                add(6, GateKind::HADAMARD, L.x_ancilla(i));
                add_meas(7, GateKind::MEAS_Z, PauliType::X, i, false);
            }
            for (int i = 0; i < L.num_z_stabs(); ++i) {
                add(1, GateKind::PREP_Z, L.z_ancilla(i));
                add_meas(6, GateKind::MEAS_Z, PauliType::Z, i, false);
            }
            break;
        case Variant::DEPTH6:
            for (int i = 0; i < L.num_x_stabs(); ++i) {
                add(0, GateKind::PREP_X, L.x_ancilla(i));
                add_meas(5, GateKind::MEAS_X, PauliType::X, i, false);
            }
            for (int i = 0; i < L.num_z_stabs(); ++i) {
                add(0, GateKind::PREP_Z, L.z_ancilla(i));
                add_meas(5, GateKind::MEAS_Z, PauliType::Z, i, false);
            }
            break;
        case Variant::DEPTH5:
            // Measurement is nondestructive and re-prepares the ancilla, so
            // rounds after the first need no standalone preparation step.
            for (int i = 0; i < L.num_x_stabs(); ++i)
                add_meas(4, GateKind::MEAS_X, PauliType::X, i, true);
            for (int i = 0; i < L.num_z_stabs(); ++i)
                add_meas(4, GateKind::MEAS_Z, PauliType::Z, i, true);
            for (int i = 0; i < L.num_x_stabs(); ++i) {
                GateLocation g;
                g.kind = GateKind::PREP_X;
                g.q0 = L.x_ancilla(i);
                S.round0_prep.push_back(g);
            }
            for (int i = 0; i < L.num_z_stabs(); ++i) {
                GateLocation g;
                g.kind = GateKind::PREP_Z;
                g.q0 = L.z_ancilla(i);
                S.round0_prep.push_back(g);
            }
            break;
    }
    add_cnots(PauliType::X);
    add_cnots(PauliType::Z);

    // Insert identity gates wherever a qubit has no active gate, and check
    // that active gates form a partial matching per step.
    std::vector<std::vector<char>> busy(S.depth, std::vector<char>(L.num_qubits(), 0));
    for (const auto& g : gs) {
        for (int q : {g.q0, g.q1}) {
            if (q < 0) continue;
            if (busy[g.time_step][q])
                throw std::logic_error("build_schedule: qubit double-booked at step " +
                                       std::to_string(g.time_step));
            busy[g.time_step][q] = 1;
        }
    }
    for (int t = 0; t < S.depth; ++t)
        for (int q = 0; q < L.num_qubits(); ++q)
            if (!busy[t][q]) add(t, GateKind::IDLE, q);

    std::sort(gs.begin(), gs.end(), [](const GateLocation& a, const GateLocation& b) {
        if (a.time_step != b.time_step) return a.time_step < b.time_step;
        return a.q0 < b.q0;
    });
    S.index_steps();
    return S;
}

inline std::vector<GateLocation> idle_locations(const CircuitSchedule& S) {
    std::vector<GateLocation> out;
    for (const auto& g : S.gates)
        if (g.kind == GateKind::IDLE) out.push_back(g);
    return out;
}

inline void dump_schedule(const CircuitSchedule& S, std::ostream& os) {
    for (const auto& g : S.gates) {
        os << "t=" << g.time_step << " " << gate_kind_name(g.kind) << " " << g.q0;
        if (g.q1 >= 0) os << "," << g.q1;
        os << "\n";
    }
}

}  // namespace surfsim
