#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "surfsim/lattice.hpp"
#include "surfsim/rng.hpp"
#include "surfsim/schedule.hpp"

namespace surfsim {

enum class NoiseKind { CODE_CAPACITY, PHENOMENOLOGICAL, STANDARD, BALANCED, PERFECT_1Q };

inline const char* noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::CODE_CAPACITY: return "capacity";
        case NoiseKind::PHENOMENOLOGICAL: return "pheno";
        case NoiseKind::STANDARD: return "standard";
        case NoiseKind::BALANCED: return "balanced";
        case NoiseKind::PERFECT_1Q: return "perfect1q";
    }
    return "?";
}

struct NoiseModel {
    NoiseKind kind = NoiseKind::STANDARD;
    double p = 0.0;
    double p_1q = 0.0, p_2q = 0.0, p_prep = 0.0, p_meas = 0.0, p_idle = 0.0;

    NoiseModel() = default;
    NoiseModel(NoiseKind k, double phys_p) : kind(k), p(phys_p) {
        if (p < 0.0 || p >= 1.0) throw std::invalid_argument("NoiseModel: p must be in [0,1)");
        switch (kind) {
            case NoiseKind::STANDARD:
                p_1q = p_2q = p_prep = p_meas = p_idle = p;
                break;
            case NoiseKind::BALANCED:
                // Idle and 1q marginals match the per-leg CNOT marginal:
                // (4p/5)*1 == p*(12/15).
                p_1q = p_idle = 4.0 * p / 5.0;
                p_prep = p_meas = 2.0 * p / 3.0;
                p_2q = p;
                break;
            case NoiseKind::PERFECT_1Q:
                p_2q = p;
                break;
            case NoiseKind::CODE_CAPACITY:
            case NoiseKind::PHENOMENOLOGICAL:
                break;  // circuit locations unused
        }
    }

    bool is_circuit_level() const {
        return kind == NoiseKind::STANDARD || kind == NoiseKind::BALANCED ||
               kind == NoiseKind::PERFECT_1Q;
    }

    double location_prob(GateKind g) const {
        switch (g) {
            case GateKind::CNOT: return p_2q;
            case GateKind::HADAMARD: return p_1q;
            case GateKind::IDLE: return p_idle;
            case GateKind::PREP_Z:
            case GateKind::PREP_X: return p_prep;
            case GateKind::MEAS_Z:
            case GateKind::MEAS_X: return p_meas;
        }
        return 0.0;
    }
};

// Pauli masks: bit 0 = X component, bit 1 = Z component (so 3 = Y).
constexpr uint8_t PAULI_I = 0, PAULI_X = 1, PAULI_Z = 2, PAULI_Y = 3;

struct FaultEvent {
    int gate_index = -1;  // index into CircuitSchedule::gates; -1 = round-0 prep
    int round = 0;
    uint8_t p0 = 0, p1 = 0;  // Pauli applied to q0/q1 after the ideal gate
    bool meas_flip = false;  // flip the reported outcome only
    int q_override = -1;     // qubit for round-0 prep faults
};

inline uint8_t prep_fault_pauli(GateKind k) {
    // Preparing the orthogonal state: |1> for the Z basis, |-> for the X basis.
    return (k == GateKind::PREP_Z || k == GateKind::MEAS_Z) ? PAULI_X : PAULI_Z;
}

// Sample one round's faults for a circuit-level model. Each location fails
// independently with its kind's probability; Paulis are uniform over the
// allowed set. Fused measure-prepare locations carry two independent
// channels (report flip at p_meas, outgoing state flip at p_prep).
inline void sample_circuit_faults(const CircuitSchedule& S, const NoiseModel& m,
                                  int round, Rng& rng, std::vector<FaultEvent>& out) {
    if (!m.is_circuit_level())
        throw std::invalid_argument("sample_circuit_faults: needs a circuit-level model");
    for (size_t i = 0; i < S.gates.size(); ++i) {
        const GateLocation& g = S.gates[i];
        switch (g.kind) {
            case GateKind::CNOT:
                if (rng.bernoulli(m.p_2q)) {
                    uint8_t pp = static_cast<uint8_t>(1 + rng.below(15));  // 1..15
                    FaultEvent f;
                    f.gate_index = static_cast<int>(i);
                    f.round = round;
                    f.p0 = pp & 3;
                    f.p1 = (pp >> 2) & 3;
                    out.push_back(f);
                }
                break;
            case GateKind::HADAMARD:
            case GateKind::IDLE: {
                double pr = m.location_prob(g.kind);
                if (pr > 0.0 && rng.bernoulli(pr)) {
                    FaultEvent f;
                    f.gate_index = static_cast<int>(i);
                    f.round = round;
                    f.p0 = static_cast<uint8_t>(1 + rng.below(3));
                    out.push_back(f);
                }
                break;
            }
            case GateKind::PREP_Z:
            case GateKind::PREP_X:
                if (rng.bernoulli(m.p_prep)) {
                    FaultEvent f;
                    f.gate_index = static_cast<int>(i);
                    f.round = round;
                    f.p0 = prep_fault_pauli(g.kind);
                    out.push_back(f);
                }
                break;
            case GateKind::MEAS_Z:
            case GateKind::MEAS_X:
                if (rng.bernoulli(m.p_meas)) {
                    FaultEvent f;
                    f.gate_index = static_cast<int>(i);
                    f.round = round;
                    f.meas_flip = true;
                    out.push_back(f);
                }
                if (g.fused_prep && rng.bernoulli(m.p_prep)) {
                    FaultEvent f;
                    f.gate_index = static_cast<int>(i);
                    f.round = round;
                    f.p0 = prep_fault_pauli(g.kind);
                    out.push_back(f);
                }
                break;
        }
    }
}

// Faults on the explicit round-0 preparations (DEPTH5).
inline void sample_round0_prep_faults(const CircuitSchedule& S, const NoiseModel& m,
                                      Rng& rng, std::vector<FaultEvent>& out) {
    for (const auto& g : S.round0_prep)
        if (rng.bernoulli(m.p_prep)) {
            FaultEvent f;
            f.round = 0;
            f.q_override = g.q0;
            f.p0 = prep_fault_pauli(g.kind);
            out.push_back(f);
        }
}

// Code-capacity sampler: each data qubit independently picks up an X
// component with probability p and a Z component with probability p.
// This matches the per-component error rate the reported thresholds are
// quoted against (X and Z decoded separately).
inline std::vector<uint8_t> sample_code_capacity(const CodeLayout& L, double p, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("sample_code_capacity: bad p");
    std::vector<uint8_t> errs(L.num_data(), 0);
    for (auto& e : errs) {
        if (rng.bernoulli(p)) e |= PAULI_X;
        if (rng.bernoulli(p)) e |= PAULI_Z;
    }
    return errs;
}

struct PhenomenologicalSample {
    // data_errors[r]: Pauli mask added to each data qubit at the start of round r.
    std::vector<std::vector<uint8_t>> data_errors;
    // meas_flips[r]: per (X then Z) stabilizer, whether round r's outcome is flipped.
    std::vector<std::vector<uint8_t>> meas_flips;
};

inline PhenomenologicalSample sample_phenomenological(const CodeLayout& L, double p,
                                                      int rounds, Rng& rng) {
    PhenomenologicalSample s;
    s.data_errors.resize(rounds);
    s.meas_flips.resize(rounds);
    int ns = L.num_x_stabs() + L.num_z_stabs();
    for (int r = 0; r < rounds; ++r) {
        s.data_errors[r].assign(L.num_data(), 0);
        for (auto& e : s.data_errors[r]) {
            if (rng.bernoulli(p)) e |= PAULI_X;
            if (rng.bernoulli(p)) e |= PAULI_Z;
        }
        s.meas_flips[r].assign(ns, 0);
        for (auto& f : s.meas_flips[r]) f = rng.bernoulli(p) ? 1 : 0;
    }
    return s;
}

}  // namespace surfsim
