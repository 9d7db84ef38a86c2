#include <doctest.h>

#include <cmath>
#include <map>

#include "surfsim/noise.hpp"

using namespace surfsim;

TEST_CASE("derived per-location probabilities") {
    NoiseModel std_m(NoiseKind::STANDARD, 0.01);
    CHECK(std_m.p_1q == 0.01);
    CHECK(std_m.p_2q == 0.01);
    CHECK(std_m.p_idle == 0.01);
    CHECK(std_m.p_prep == 0.01);
    CHECK(std_m.p_meas == 0.01);

    NoiseModel bal(NoiseKind::BALANCED, 0.01);
    CHECK(bal.p_1q == doctest::Approx(0.008));
    CHECK(bal.p_prep == doctest::Approx(0.01 * 2 / 3));
    CHECK(bal.p_2q == 0.01);

    NoiseModel p1q(NoiseKind::PERFECT_1Q, 0.01);
    CHECK(p1q.p_2q == 0.01);
    CHECK(p1q.p_1q == 0.0);
    CHECK(p1q.p_meas == 0.0);
    CHECK(p1q.p_idle == 0.0);
}

TEST_CASE("balanced identity: idle marginal equals CNOT leg marginal") {
    // 4p/5 * 1 == p * 12/15, exactly.
    NoiseModel bal(NoiseKind::BALANCED, 0.37);
    CHECK(bal.p_idle * 1.0 == bal.p_2q * 12.0 / 15.0);
}

TEST_CASE("p = 0 gives an empty fault list") {
    auto L = build_code(3);
    auto S = build_schedule(L, Variant::DEPTH6);
    Rng rng(7);
    std::vector<FaultEvent> out;
    sample_circuit_faults(S, NoiseModel(NoiseKind::STANDARD, 0.0), 0, rng, out);
    CHECK(out.empty());
}

TEST_CASE("rejects non-circuit models") {
    auto L = build_code(3);
    auto S = build_schedule(L, Variant::DEPTH6);
    Rng rng(7);
    std::vector<FaultEvent> out;
    CHECK_THROWS_AS(
        sample_circuit_faults(S, NoiseModel(NoiseKind::CODE_CAPACITY, 0.01), 0, rng, out),
        std::invalid_argument);
}

TEST_CASE("perfect1q faults land only on CNOT locations") {
    auto L = build_code(3);
    auto S = build_schedule(L, Variant::DEPTH6);
    Rng rng(42);
    std::vector<FaultEvent> out;
    for (int i = 0; i < 200; ++i)
        sample_circuit_faults(S, NoiseModel(NoiseKind::PERFECT_1Q, 0.05), 0, rng, out);
    CHECK(!out.empty());
    for (const auto& f : out) CHECK(S.gates[f.gate_index].kind == GateKind::CNOT);
}

TEST_CASE("CNOT fault Paulis are uniform over the 15 pairs") {
    auto L = build_code(2);
    auto S = build_schedule(L, Variant::DEPTH6);
    int gi = -1;
    for (size_t i = 0; i < S.gates.size(); ++i)
        if (S.gates[i].kind == GateKind::CNOT) {
            gi = static_cast<int>(i);
            break;
        }
    REQUIRE(gi >= 0);
    const int shots = 100000;
    const double p = 0.5;
    Rng rng(123);
    std::map<int, int> counts;
    int fired = 0;
    for (int s = 0; s < shots; ++s) {
        std::vector<FaultEvent> out;
        sample_circuit_faults(S, NoiseModel(NoiseKind::STANDARD, p), 0, rng, out);
        for (const auto& f : out)
            if (f.gate_index == gi) {
                counts[f.p0 | (f.p1 << 2)]++;
                ++fired;
            }
    }
    CHECK(counts.size() == 15);
    double expect = shots * p / 15.0;
    double sigma = std::sqrt(shots * (p / 15.0) * (1 - p / 15.0));
    for (auto [pp, c] : counts) CHECK(std::abs(c - expect) < 5 * sigma);
}

TEST_CASE("fault sampling is independent across locations") {
    auto L = build_code(2);
    auto S = build_schedule(L, Variant::DEPTH6);
    std::vector<int> cnots;
    for (size_t i = 0; i < S.gates.size(); ++i)
        if (S.gates[i].kind == GateKind::CNOT) cnots.push_back(static_cast<int>(i));
    REQUIRE(cnots.size() >= 2);
    int a = cnots[0], b = cnots[1];
    const int shots = 100000;
    const double p = 0.2;
    Rng rng(5);
    int na = 0, nb = 0, nab = 0;
    for (int s = 0; s < shots; ++s) {
        std::vector<FaultEvent> out;
        sample_circuit_faults(S, NoiseModel(NoiseKind::STANDARD, p), 0, rng, out);
        bool fa = false, fb = false;
        for (const auto& f : out) {
            fa |= f.gate_index == a;
            fb |= f.gate_index == b;
        }
        na += fa;
        nb += fb;
        nab += fa && fb;
    }
    double fa = double(na) / shots, fb = double(nb) / shots, fab = double(nab) / shots;
    double sigma = std::sqrt(p * p * (1 - p * p) / shots);
    CHECK(std::abs(fab - fa * fb) < 5 * sigma);
}

TEST_CASE("code capacity sampler marginals") {
    auto L = build_code(3);
    Rng rng(11);
    auto zero = sample_code_capacity(L, 0.0, rng);
    for (auto e : zero) CHECK(e == 0);

    // d=3, p=0.10: mean X-component weight 13 * 0.10 = 1.3.
    const int shots = 100000;
    long total_x = 0;
    for (int s = 0; s < shots; ++s)
        for (auto e : sample_code_capacity(L, 0.10, rng)) total_x += e & 1;
    double mean = double(total_x) / shots;
    double sigma = std::sqrt(13 * 0.1 * 0.9 / shots);
    CHECK(std::abs(mean - 1.3) < 5 * sigma);

    // Near p = 1 almost every qubit carries an error.
    long heavy = 0;
    for (auto e : sample_code_capacity(L, 0.999, rng)) heavy += e != 0;
    CHECK(heavy >= 11);
}

TEST_CASE("phenomenological sampler coverage and flip rate") {
    auto L = build_code(3);
    Rng rng(13);
    auto s0 = sample_phenomenological(L, 0.0, 3, rng);
    for (const auto& r : s0.data_errors)
        for (auto e : r) CHECK(e == 0);
    for (const auto& r : s0.meas_flips)
        for (auto f : r) CHECK(f == 0);
    CHECK(s0.data_errors.size() == 3);
    CHECK(s0.meas_flips[0].size() == size_t(L.num_x_stabs() + L.num_z_stabs()));

    const int shots = 20000;
    const double p = 0.1;
    long flips = 0;
    long cells = 0;
    for (int s = 0; s < shots; ++s) {
        auto smp = sample_phenomenological(L, p, 2, rng);
        for (const auto& r : smp.meas_flips)
            for (auto f : r) {
                flips += f;
                ++cells;
            }
    }
    double rate = double(flips) / cells;
    double sigma = std::sqrt(p * (1 - p) / cells);
    CHECK(std::abs(rate - p) < 5 * sigma);
}
