#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "surfsim/lattice.hpp"
#include "surfsim/noise.hpp"
#include "surfsim/schedule.hpp"

namespace surfsim {

// Accumulated X/Z frame components, one bit per qubit (data + ancilla).
struct PauliFrame {
    std::vector<uint8_t> x, z;
    explicit PauliFrame(int n = 0) : x(n, 0), z(n, 0) {}
};

// Clifford conjugation of the frame through one gate. Measurement outcome
// handling lives in the round loop; here MEAS/IDLE are identity.
inline void propagate(PauliFrame& f, const GateLocation& g) {
    switch (g.kind) {
        case GateKind::CNOT:
            f.x[g.q1] ^= f.x[g.q0];
            f.z[g.q0] ^= f.z[g.q1];
            break;
        case GateKind::HADAMARD:
            std::swap(f.x[g.q0], f.z[g.q0]);
            break;
        case GateKind::PREP_Z:
        case GateKind::PREP_X:
            f.x[g.q0] = 0;
            f.z[g.q0] = 0;
            break;
        case GateKind::MEAS_Z:
        case GateKind::MEAS_X:
        case GateKind::IDLE:
            break;
    }
}

// Global stabilizer indexing: X stabilizers first, then Z.
inline int stab_global(const CodeLayout& L, PauliType t, int i) {
    return t == PauliType::X ? i : L.num_x_stabs() + i;
}

// Syndrome flips evaluated directly from a residual data-qubit frame.
// X stabilizers flip on Z/Y components, Z stabilizers on X/Y.
inline std::vector<uint8_t> direct_syndrome(const CodeLayout& L,
                                            const std::vector<uint8_t>& data_masks) {
    std::vector<uint8_t> syn(L.num_x_stabs() + L.num_z_stabs(), 0);
    for (int i = 0; i < L.num_x_stabs(); ++i) {
        uint8_t s = 0;
        for (int q : L.x_stabilizers[i].support) s ^= (data_masks[q] >> 1) & 1;
        syn[i] = s;
    }
    for (int i = 0; i < L.num_z_stabs(); ++i) {
        uint8_t s = 0;
        for (int q : L.z_stabilizers[i].support) s ^= data_masks[q] & 1;
        syn[L.num_x_stabs() + i] = s;
    }
    return syn;
}

// d noisy rounds plus one final ideal round computed from the residual.
struct SyndromeHistory {
    std::vector<std::vector<uint8_t>> rows;  // (rounds+1) x num_stabs outcome flips
    std::vector<uint8_t> residual;           // Pauli mask per data qubit
};

struct DetectionEvent {
    int round;       // 0..rounds
    int stab;        // global stabilizer index
    bool operator==(const DetectionEvent&) const = default;
};

struct DetectionEventSet {
    std::vector<DetectionEvent> events;
    bool empty() const { return events.empty(); }
};

// Deterministic simulation of the schedule under an explicit fault list.
inline SyndromeHistory run_with_faults(const CodeLayout& L, const CircuitSchedule& S,
                                       int rounds, const std::vector<FaultEvent>& faults) {
    const int nq = L.num_qubits();
    const int ns = L.num_x_stabs() + L.num_z_stabs();
    PauliFrame f(nq);
    SyndromeHistory h;
    h.rows.assign(rounds + 1, std::vector<uint8_t>(ns, 0));

    // Faults grouped per round and gate index.
    std::vector<std::vector<const FaultEvent*>> per_round(rounds);
    for (const auto& fe : faults) {
        if (fe.round < 0 || fe.round >= rounds) continue;
        per_round[fe.round].push_back(&fe);
    }

    for (int r = 0; r < rounds; ++r) {
        // Direct qubit faults (round-0 preps, injected data errors) apply
        // at the start of their round.
        for (const FaultEvent* fe : per_round[r])
            if (fe->gate_index < 0 && fe->q_override >= 0) {
                f.x[fe->q_override] ^= fe->p0 & 1;
                f.z[fe->q_override] ^= (fe->p0 >> 1) & 1;
            }
        std::vector<std::vector<const FaultEvent*>> by_gate;  // lazily built
        bool any = !per_round[r].empty();
        if (any) {
            by_gate.assign(S.gates.size(), {});
            for (const FaultEvent* fe : per_round[r])
                if (fe->gate_index >= 0) by_gate[fe->gate_index].push_back(fe);
        }
        for (int t = 0; t < S.depth; ++t) {
            for (int gi : S.by_step[t]) {
                const GateLocation& g = S.gates[gi];
                uint8_t outcome = 0;
                if (g.kind == GateKind::MEAS_Z)
                    outcome = f.x[g.q0];
                else if (g.kind == GateKind::MEAS_X)
                    outcome = f.z[g.q0];
                propagate(f, g);
                if (g.fused_prep) {
                    f.x[g.q0] = 0;
                    f.z[g.q0] = 0;
                }
                if (any)
                    for (const FaultEvent* fe : by_gate[gi]) {
                        if (fe->meas_flip) outcome ^= 1;
                        if (fe->p0) {
                            f.x[g.q0] ^= fe->p0 & 1;
                            f.z[g.q0] ^= (fe->p0 >> 1) & 1;
                        }
                        if (fe->p1 && g.q1 >= 0) {
                            f.x[g.q1] ^= fe->p1 & 1;
                            f.z[g.q1] ^= (fe->p1 >> 1) & 1;
                        }
                    }
                if (g.stab_index >= 0)
                    h.rows[r][stab_global(L, g.stab_type, g.stab_index)] = outcome;
            }
        }
    }

    h.residual.resize(L.num_data());
    for (int q = 0; q < L.num_data(); ++q)
        h.residual[q] = static_cast<uint8_t>(f.x[q] | (f.z[q] << 1));
    h.rows[rounds] = direct_syndrome(L, h.residual);
    return h;
}

// Sample faults and simulate `rounds` noisy rounds plus the ideal closure.
inline SyndromeHistory run_rounds(const CodeLayout& L, const CircuitSchedule& S,
                                  const NoiseModel& m, int rounds, Rng& rng) {
    std::vector<FaultEvent> faults;
    if (!S.round0_prep.empty()) sample_round0_prep_faults(S, m, rng, faults);
    for (int r = 0; r < rounds; ++r) sample_circuit_faults(S, m, r, rng, faults);
    return run_with_faults(L, S, rounds, faults);
}

// XOR of consecutive syndrome rows, with an all-clear round -1 baseline.
inline DetectionEventSet detection_events(const SyndromeHistory& h) {
    DetectionEventSet ev;
    const int ns = h.rows.empty() ? 0 : static_cast<int>(h.rows[0].size());
    for (size_t r = 0; r < h.rows.size(); ++r)
        for (int s = 0; s < ns; ++s) {
            uint8_t prev = r == 0 ? 0 : h.rows[r - 1][s];
            if (h.rows[r][s] != prev) ev.events.push_back({static_cast<int>(r), s});
        }
    return ev;
}

// Code-capacity history: one ideal round, errors on data qubits only.
inline SyndromeHistory simulate_code_capacity(const CodeLayout& L,
                                              const std::vector<uint8_t>& data_errors) {
    SyndromeHistory h;
    h.residual = data_errors;
    h.rows.assign(1, direct_syndrome(L, data_errors));
    return h;
}

// Phenomenological history: cumulative data errors, per-round report flips,
// ideal closure round.
inline SyndromeHistory simulate_phenomenological(const CodeLayout& L,
                                                 const PhenomenologicalSample& s) {
    const int rounds = static_cast<int>(s.data_errors.size());
    SyndromeHistory h;
    std::vector<uint8_t> cum(L.num_data(), 0);
    h.rows.assign(rounds + 1, {});
    for (int r = 0; r < rounds; ++r) {
        for (int q = 0; q < L.num_data(); ++q) cum[q] ^= s.data_errors[r][q];
        h.rows[r] = direct_syndrome(L, cum);
        for (size_t i = 0; i < h.rows[r].size(); ++i) h.rows[r][i] ^= s.meas_flips[r][i];
    }
    h.residual = cum;
    h.rows[rounds] = direct_syndrome(L, cum);
    return h;
}

inline void dump_events(const CodeLayout& L, const DetectionEventSet& ev, std::ostream& os) {
    for (const auto& e : ev.events) {
        bool is_x = e.stab < L.num_x_stabs();
        os << "t=" << e.round << " stab=" << (is_x ? e.stab : e.stab - L.num_x_stabs())
           << " type=" << (is_x ? "X" : "Z") << "\n";
    }
}

}  // namespace surfsim
