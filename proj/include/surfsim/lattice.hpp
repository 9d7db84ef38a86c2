#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace surfsim {

enum class PauliType { X, Z };

// Neighbor slots within a stabilizer, fixed order. Absent boundary
// neighbors are -1. This ordering is consumed by the gate scheduler and
// must never change silently.
enum NeighborSlot { NORTH = 0, WEST = 1, EAST = 2, SOUTH = 3 };

struct Stabilizer {
    int row = 0, col = 0;                  // doubled-grid coordinates
    std::array<int, 4> neighbor = {-1, -1, -1, -1};  // data indices by slot
    std::vector<int> support;              // present neighbors, slot order
};

// Planar surface code on the doubled integer grid [0, 2d-2]^2.
// Data qubits sit at (even,even) and (odd,odd); X (vertex) stabilizers at
// (even,odd); Z (face) stabilizers at (odd,even). Indexing is row-major
// by coordinate, so layouts are stable across runs.
struct CodeLayout {
    int distance = 0;
    std::vector<std::pair<int, int>> data_coords;
    std::vector<Stabilizer> x_stabilizers;
    std::vector<Stabilizer> z_stabilizers;
    std::vector<int> logical_x_support;   // left column, connects top/bottom
    std::vector<int> logical_z_support;   // top row, connects left/right

    int num_data() const { return static_cast<int>(data_coords.size()); }
    int num_x_stabs() const { return static_cast<int>(x_stabilizers.size()); }
    int num_z_stabs() const { return static_cast<int>(z_stabilizers.size()); }
    int num_qubits() const { return num_data() + num_x_stabs() + num_z_stabs(); }

    // Global qubit ids: data first, then X ancillas, then Z ancillas.
    int x_ancilla(int i) const { return num_data() + i; }
    int z_ancilla(int i) const { return num_data() + num_x_stabs() + i; }

    const Stabilizer& stab(PauliType t, int i) const {
        return t == PauliType::X ? x_stabilizers[i] : z_stabilizers[i];
    }
    int num_stabs(PauliType t) const {
        return t == PauliType::X ? num_x_stabs() : num_z_stabs();
    }

    int data_index(int r, int c) const {
        auto it = data_by_coord_.find({r, c});
        return it == data_by_coord_.end() ? -1 : it->second;
    }

    std::map<std::pair<int, int>, int> data_by_coord_;
};

inline CodeLayout build_code(int d) {
    if (d < 2) throw std::invalid_argument("build_code: distance must be >= 2");
    CodeLayout L;
    L.distance = d;
    const int n = 2 * d - 1;  // grid extent per axis

    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if ((r % 2) == (c % 2)) {
                L.data_by_coord_[{r, c}] = static_cast<int>(L.data_coords.size());
                L.data_coords.emplace_back(r, c);
            }

    auto make_stab = [&](int r, int c) {
        Stabilizer s;
        s.row = r;
        s.col = c;
        const int dr[4] = {-1, 0, 0, 1};   // N, W, E, S
        const int dc[4] = {0, -1, 1, 0};
        for (int k = 0; k < 4; ++k) {
            int rr = r + dr[k], cc = c + dc[k];
            if (rr < 0 || cc < 0 || rr >= n || cc >= n) continue;
            int q = L.data_index(rr, cc);
            s.neighbor[k] = q;
            s.support.push_back(q);
        }
        return s;
    };

    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (r % 2 == 0 && c % 2 == 1) L.x_stabilizers.push_back(make_stab(r, c));
            if (r % 2 == 1 && c % 2 == 0) L.z_stabilizers.push_back(make_stab(r, c));
        }

    for (int r = 0; r < n; r += 2) L.logical_x_support.push_back(L.data_index(r, 0));
    for (int c = 0; c < n; c += 2) L.logical_z_support.push_back(L.data_index(0, c));
    return L;
}

// True iff the two Pauli operators commute: same type always, opposite
// types iff the supports overlap on an even number of qubits.
inline bool commutes(const std::vector<int>& support_a, PauliType type_a,
                     const std::vector<int>& support_b, PauliType type_b) {
    if (type_a == type_b) return true;
    std::vector<char> in_a;
    int max_q = 0;
    for (int q : support_a) max_q = std::max(max_q, q);
    for (int q : support_b) max_q = std::max(max_q, q);
    in_a.assign(max_q + 1, 0);
    for (int q : support_a) in_a[q] ^= 1;
    int overlap = 0;
    for (int q : support_b)
        if (in_a[q]) ++overlap;
    return overlap % 2 == 0;
}

inline void dump_layout(const CodeLayout& L, std::ostream& os) {
    os << "distance " << L.distance << "\n";
    for (int i = 0; i < L.num_data(); ++i)
        os << "data " << i << " (" << L.data_coords[i].first << ","
           << L.data_coords[i].second << ")\n";
    auto dump_stabs = [&](const char* name, const std::vector<Stabilizer>& ss) {
        for (size_t i = 0; i < ss.size(); ++i) {
            os << name << " " << i << " (" << ss[i].row << "," << ss[i].col << ")";
            for (int q : ss[i].support) os << " " << q;
            os << "\n";
        }
    };
    dump_stabs("xstab", L.x_stabilizers);
    dump_stabs("zstab", L.z_stabilizers);
    auto dump_logical = [&](const char* name, const std::vector<int>& qs) {
        os << name;
        for (int q : qs) os << " " << q;
        os << "\n";
    };
    dump_logical("logical_x", L.logical_x_support);
    dump_logical("logical_z", L.logical_z_support);
}

}  // namespace surfsim
