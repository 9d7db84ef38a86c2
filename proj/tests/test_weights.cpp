#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "surfsim/weights.hpp"

using namespace surfsim;

namespace {

const EdgeClass* find_class(const EdgeWeightTable& T, PauliType g, int a, int b, int dt) {
    for (const auto& c : T.classes)
        if (c.graph == g && c.s_a == a && c.s_b == b && c.dt == dt) return &c;
    return nullptr;
}

int count_classes(const EdgeWeightTable& T, PauliType g, int dt, bool boundary) {
    int n = 0;
    for (const auto& c : T.classes)
        if (c.graph == g && c.dt == dt && (c.s_b < 0) == boundary) ++n;
    return n;
}

}  // namespace

TEST_CASE("code capacity table: one spatial class per data qubit, all at p") {
    for (int d : {3, 5}) {
        CodeLayout L = build_code(d);
        double p = 0.08;
        auto T = derive_simple_weights(L, NoiseKind::CODE_CAPACITY, p);
        for (auto g : {PauliType::X, PauliType::Z}) {
            int spatial = count_classes(T, g, 0, false);
            int boundary = count_classes(T, g, 0, true);
            CHECK(spatial + boundary == L.num_data());
            // Boundary qubits of each graph: d per boundary edge, 2 edges.
            CHECK(boundary == 2 * d);
            CHECK(count_classes(T, g, 1, false) == 0);
        }
        for (const auto& c : T.classes) {
            CHECK(c.p_e == p);
            CHECK(c.w_e == doctest::Approx(std::log((1 - p) / p)));
            REQUIRE(c.flips.size() == 1);
        }
    }
}

TEST_CASE("phenomenological table adds unit temporal classes per stabilizer") {
    CodeLayout L = build_code(5);
    double p = 0.03;
    auto T = derive_simple_weights(L, NoiseKind::PHENOMENOLOGICAL, p);
    for (auto g : {PauliType::X, PauliType::Z}) {
        CHECK(count_classes(T, g, 1, false) == L.num_stabs(g));
        for (int i = 0; i < L.num_stabs(g); ++i) {
            const EdgeClass* c = find_class(T, g, i, i, 1);
            REQUIRE(c);
            CHECK(c->p_e == p);
            CHECK(c->flips.empty());
        }
    }
}

TEST_CASE("circuit weights derive cleanly for every variant and model") {
    CodeLayout L = build_code(3);
    for (auto v : {Variant::DEPTH8, Variant::DEPTH6, Variant::DEPTH5}) {
        CircuitSchedule S = build_schedule(L, v);
        for (auto k : {NoiseKind::STANDARD, NoiseKind::BALANCED, NoiseKind::PERFECT_1Q}) {
            NoiseModel m(k, 0.003);
            auto T = derive_circuit_weights(L, S, m);
            CHECK(!T.classes.empty());
            for (const auto& c : T.classes) {
                CHECK(c.p_e > 0.0);
                CHECK(c.p_e < 0.5);
                CHECK(c.w_e > 0.0);
                CHECK(c.dt >= 0);
                CHECK(c.dt <= 2);
            }
            // Every stabilizer gets a temporal self-edge (measurement error
            // channel, or ancilla faults for perfect1q).
            for (auto g : {PauliType::X, PauliType::Z})
                for (int i = 0; i < L.num_stabs(g); ++i) CHECK(find_class(T, g, i, i, 1));
        }
    }
}

TEST_CASE("standard depth-6 weights contain diagonal space-time classes") {
    CodeLayout L = build_code(5);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.005);
    auto T = derive_circuit_weights(L, S, m);
    int diagonal = 0;
    for (const auto& c : T.classes)
        if (c.dt == 1 && c.s_b >= 0 && c.s_a != c.s_b) ++diagonal;
    CHECK(diagonal > 0);
    // Hook errors make the diagonals cheaper than pure-measurement edges
    // would suggest; they should still be real probabilities.
    for (const auto& c : T.classes)
        if (c.dt == 1 && c.s_b >= 0 && c.s_a != c.s_b) CHECK(c.p_e >= m.p_2q / 15.0);
}

TEST_CASE("temporal edge probability matches the hand count for depth-6 standard") {
    // Bulk Z stabilizer, d=5. Mechanisms flipping exactly the (t, t+1)
    // self-pair on the Z graph: the measurement flip, the prep X fault,
    // plus CNOT faults on the ancilla that act after some of the four
    // couplings and before the measurement (each CNOT has 4 of 15 two-qubit
    // Paulis with X on the ancilla and I/Z on the data... counted exactly by
    // enumeration, so here we only pin the dominant terms).
    CodeLayout L = build_code(5);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.004);
    auto T = derive_circuit_weights(L, S, m);
    int bulk = -1;
    for (int i = 0; i < L.num_z_stabs(); ++i)
        if (L.z_stabilizers[i].support.size() == 4 && L.z_stabilizers[i].row == 5) {
            bulk = i;
            break;
        }
    REQUIRE(bulk >= 0);
    const EdgeClass* c = find_class(T, PauliType::Z, bulk, bulk, 1);
    REQUIRE(c);
    double lower = xor_combine(m.p_meas, m.p_prep);
    CHECK(c->p_e > lower);
    CHECK(c->p_e < lower + 8 * m.p_2q);
}

TEST_CASE("perfect1q weights have no prep/meas-only channels") {
    CodeLayout L = build_code(3);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel std_m(NoiseKind::STANDARD, 0.004), p1q(NoiseKind::PERFECT_1Q, 0.004);
    auto Ts = derive_circuit_weights(L, S, std_m);
    auto Tp = derive_circuit_weights(L, S, p1q);
    // With only two-qubit faults, temporal self-edges lose the meas+prep
    // mass and must be strictly less likely than under the standard model.
    for (auto g : {PauliType::X, PauliType::Z})
        for (int i = 0; i < L.num_stabs(g); ++i) {
            const EdgeClass* s = find_class(Ts, g, i, i, 1);
            const EdgeClass* p = find_class(Tp, g, i, i, 1);
            REQUIRE(s);
            REQUIRE(p);
            CHECK(p->p_e < s->p_e);
        }
}

TEST_CASE("bulk translation symmetry of circuit-derived classes") {
    CodeLayout L = build_code(7);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.005);
    auto T = derive_circuit_weights(L, S, m);
    // Two interior Z stabilizers two columns apart see identical local
    // circuits, so their temporal edges carry the same probability.
    auto find_z = [&](int row, int col) {
        for (int i = 0; i < L.num_z_stabs(); ++i)
            if (L.z_stabilizers[i].row == row && L.z_stabilizers[i].col == col) return i;
        return -1;
    };
    int a = find_z(5, 4), b = find_z(5, 6), c = find_z(7, 4);
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    REQUIRE(c >= 0);
    const EdgeClass *ea = find_class(T, PauliType::Z, a, a, 1),
                    *eb = find_class(T, PauliType::Z, b, b, 1),
                    *ec = find_class(T, PauliType::Z, c, c, 1);
    REQUIRE(ea);
    REQUIRE(eb);
    REQUIRE(ec);
    CHECK(ea->p_e == doctest::Approx(eb->p_e).epsilon(1e-12));
    CHECK(ea->p_e == doctest::Approx(ec->p_e).epsilon(1e-12));
}

TEST_CASE("depth-5 fused prep feeds the temporal channel") {
    CodeLayout L = build_code(3);
    CircuitSchedule S5 = build_schedule(L, Variant::DEPTH5);
    CircuitSchedule S6 = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.004);
    auto T5 = derive_circuit_weights(L, S5, m);
    auto T6 = derive_circuit_weights(L, S6, m);
    // Both variants carry meas + prep mass on the self-edge; depth-5 just
    // sources the prep part from the fused location.
    for (int i = 0; i < L.num_z_stabs(); ++i) {
        const EdgeClass* c5 = find_class(T5, PauliType::Z, i, i, 1);
        REQUIRE(c5);
        CHECK(c5->p_e > xor_combine(m.p_meas, m.p_prep) * 0.99);
    }
    CHECK(!T5.classes.empty());
    CHECK(!T6.classes.empty());
}

TEST_CASE("rectilinear table: unit edges and straight boundary chains") {
    CodeLayout L = build_code(5);
    auto T = rectilinear_weights(L);
    CHECK(T.rectilinear);
    for (const auto& c : T.classes) {
        if (c.s_b >= 0) {
            CHECK(c.w_e == 1.0);
        } else {
            CHECK(c.w_e >= 1.0);
            CHECK(c.flips.size() == static_cast<size_t>(c.w_e));
        }
        CHECK(c.p_e == 0.0);
    }
    // Z stabilizer on the row next to the top boundary: one step out.
    for (int i = 0; i < L.num_z_stabs(); ++i) {
        const auto& s = L.z_stabilizers[i];
        const EdgeClass* b = find_class(T, PauliType::Z, i, -1, 0);
        REQUIRE(b);
        int expect = std::min((s.row + 1) / 2, (2 * L.distance - 1 - s.row) / 2);
        CHECK(b->w_e == expect);
    }
}

TEST_CASE("weights CSV dump is sorted with the fixed header") {
    CodeLayout L = build_code(3);
    CircuitSchedule S = build_schedule(L, Variant::DEPTH6);
    NoiseModel m(NoiseKind::STANDARD, 0.005);
    auto T = derive_circuit_weights(L, S, m);
    std::ostringstream os;
    dump_weights_csv(L, T, os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "graph,type,dt,ds_row,ds_col,p_e,w_e");
    std::vector<std::string> rows;
    while (std::getline(is, line)) rows.push_back(line);
    CHECK(rows.size() > 10);
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end());
    // Rows are emitted in a canonical order (not necessarily lexicographic
    // on the raw string, but deterministic): dumping twice is identical.
    std::ostringstream os2;
    dump_weights_csv(L, T, os2);
    CHECK(os.str() == os2.str());
}
