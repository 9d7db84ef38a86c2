#include <doctest.h>

#include <vector>

#include "surfsim/decoder.hpp"

using namespace surfsim;

namespace {

// Every single-fault mechanism of the model, at every location and round,
// plus the explicit round-0 preparations when the schedule has them.
std::vector<FaultEvent> all_single_faults(const CircuitSchedule& S, const NoiseModel& m,
                                          int rounds) {
    std::vector<FaultEvent> out;
    for (int r = 0; r < rounds; ++r)
        for (size_t i = 0; i < S.gates.size(); ++i)
            for (const auto& [f, prob] :
                 detail::location_mechanisms(S, m, static_cast<int>(i), r))
                out.push_back(f);
    for (const auto& g : S.round0_prep) {
        FaultEvent f;
        f.round = 0;
        f.q_override = g.q0;
        f.p0 = prep_fault_pauli(g.kind);
        out.push_back(f);
    }
    return out;
}

int count_single_fault_failures(const CodeLayout& L, const CircuitSchedule& S,
                                const NoiseModel& m, const EdgeWeightTable& T, int rounds) {
    DecoderContext ctx = DecoderContext::make(L, &S, m, T, rounds);
    int failures = 0;
    for (const auto& f : all_single_faults(S, m, rounds)) {
        auto h = run_with_faults(L, S, rounds, {f});
        auto out = decode_history(ctx, h, true);
        failures += out.failure_x || out.failure_z;
    }
    return failures;
}

}  // namespace

TEST_CASE("capacity: single data errors always decode cleanly (d=3,5)") {
    for (int d : {3, 5}) {
        CodeLayout L = build_code(d);
        NoiseModel m(NoiseKind::CODE_CAPACITY, 0.05);
        auto T = derive_simple_weights(L, m.kind, m.p);
        DecoderContext ctx = DecoderContext::make(L, nullptr, m, T, 0);
        for (int q = 0; q < L.num_data(); ++q)
            for (uint8_t pauli : {PAULI_X, PAULI_Z, PAULI_Y}) {
                std::vector<uint8_t> errs(L.num_data(), 0);
                errs[q] = pauli;
                auto h = simulate_code_capacity(L, errs);
                auto out = decode_history(ctx, h, true);
                CHECK(!out.failure_x);
                CHECK(!out.failure_z);
            }
    }
}

TEST_CASE("capacity: all weight-(d-1)/2 X patterns decode cleanly at d=5") {
    CodeLayout L = build_code(5);
    NoiseModel m(NoiseKind::CODE_CAPACITY, 0.05);
    auto T = derive_simple_weights(L, m.kind, m.p);
    DecoderContext ctx = DecoderContext::make(L, nullptr, m, T, 0);
    for (int a = 0; a < L.num_data(); ++a)
        for (int b = a + 1; b < L.num_data(); ++b) {
            std::vector<uint8_t> errs(L.num_data(), 0);
            errs[a] = PAULI_X;
            errs[b] = PAULI_X;
            auto out = decode_history(ctx, simulate_code_capacity(L, errs), true);
            CHECK(!out.failure_x);
        }
}

TEST_CASE("pheno: a lone measurement flip never fails") {
    CodeLayout L = build_code(3);
    NoiseModel m(NoiseKind::PHENOMENOLOGICAL, 0.03);
    auto T = derive_simple_weights(L, m.kind, m.p);
    int rounds = 3;
    DecoderContext ctx = DecoderContext::make(L, nullptr, m, T, rounds);
    int ns = L.num_x_stabs() + L.num_z_stabs();
    for (int r = 0; r < rounds; ++r)
        for (int s = 0; s < ns; ++s) {
            PhenomenologicalSample smp;
            smp.data_errors.assign(rounds, std::vector<uint8_t>(L.num_data(), 0));
            smp.meas_flips.assign(rounds, std::vector<uint8_t>(ns, 0));
            smp.meas_flips[r][s] = 1;
            auto out = decode_history(ctx, simulate_phenomenological(L, smp), true);
            CHECK(!out.failure_x);
            CHECK(!out.failure_z);
        }
}

TEST_CASE("exhaustive single faults at d=3: circuit weights never fail") {
    CodeLayout L = build_code(3);
    for (auto v : {Variant::DEPTH8, Variant::DEPTH6, Variant::DEPTH5}) {
        CircuitSchedule S = build_schedule(L, v);
        for (auto k : {NoiseKind::STANDARD, NoiseKind::BALANCED, NoiseKind::PERFECT_1Q}) {
            NoiseModel m(k, 0.004);
            auto T = derive_circuit_weights(L, S, m);
            CHECK(count_single_fault_failures(L, S, m, T, 3) == 0);
        }
    }
}

TEST_CASE("exhaustive single faults at d=3: rectilinear weights do fail") {
    // The uniform metric ignores the correlated space-time errors of the
    // extraction circuit, so some single fault is mis-matched.
    CodeLayout L = build_code(3);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.004);
    auto T = rectilinear_weights(L);
    CHECK(count_single_fault_failures(L, S, m, T, 3) >= 1);
}

TEST_CASE("decode_trial is deterministic in the RNG stream") {
    CodeLayout L = build_code(3);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.01);
    auto T = derive_circuit_weights(L, S, m);
    DecoderContext ctx = DecoderContext::make(L, &S, m, T, 3);
    for (int t = 0; t < 50; ++t) {
        Rng a = Rng::from_key(99, 3, 0, t);
        Rng b = Rng::from_key(99, 3, 0, t);
        auto oa = decode_trial(ctx, a, true);
        auto ob = decode_trial(ctx, b, true);
        CHECK(oa.failure_x == ob.failure_x);
        CHECK(oa.failure_z == ob.failure_z);
    }
}

TEST_CASE("syndrome neutrality holds across random circuit trials") {
    CodeLayout L = build_code(5);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH8);
    NoiseModel m(NoiseKind::STANDARD, 0.008);
    auto T = derive_circuit_weights(L, S, m);
    DecoderContext ctx = DecoderContext::make(L, &S, m, T, 5);
    Rng rng(1234);
    for (int t = 0; t < 200; ++t) CHECK_NOTHROW(decode_trial(ctx, rng, true));
}

TEST_CASE("sub-threshold scaling: larger d suppresses failures (capacity)") {
    NoiseModel m(NoiseKind::CODE_CAPACITY, 0.05);
    auto run = [&](int d) {
        CodeLayout L = build_code(d);
        auto T = derive_simple_weights(L, m.kind, m.p);
        DecoderContext ctx = DecoderContext::make(L, nullptr, m, T, 0);
        int fails = 0;
        const int shots = 4000;
        for (int t = 0; t < shots; ++t) {
            Rng rng = Rng::from_key(7, d, 0, t);
            fails += decode_trial(ctx, rng, (t & 0x3f) == 0).failure_x;
        }
        return static_cast<double>(fails) / shots;
    };
    double p3 = run(3), p7 = run(7);
    CHECK(p3 > 0.0);
    CHECK(p7 < p3 * 0.7);
}

TEST_CASE("finite match radius reproduces the complete-graph decoding") {
    CodeLayout L = build_code(3);
    NoiseModel m(NoiseKind::PHENOMENOLOGICAL, 0.04);
    auto T = derive_simple_weights(L, m.kind, m.p);
    DecoderContext full = DecoderContext::make(L, nullptr, m, T, 3);
    DecoderContext sparse = DecoderContext::make(L, nullptr, m, T, 3);
    sparse.match_radius = 50.0;  // generous but finite
    for (int t = 0; t < 300; ++t) {
        Rng a = Rng::from_key(5, 3, 1, t);
        Rng b = Rng::from_key(5, 3, 1, t);
        auto oa = decode_trial(full, a, false);
        auto ob = decode_trial(sparse, b, false);
        CHECK(oa.failure_x == ob.failure_x);
        CHECK(oa.failure_z == ob.failure_z);
    }
}
