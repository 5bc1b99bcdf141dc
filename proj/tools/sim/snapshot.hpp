#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivpb/model.hpp"

namespace ivpb::cli {

inline constexpr char kSnapshotMagic[8] = {'I', 'V', 'P', 'B', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

// Layout, little-endian:
//   magic[8] "IVPBSNAP", u32 version, u8 mode,
//   u32 dims, u32 nx[dims], f64 v_max, u32 nv,
//   f64 time, i64 step_index,
//   f64 f[N_x][N_v]   (x-major, velocity index fastest)
//   u8 has_phi, f64 phi[N_x] when has_phi
struct Snapshot {
    Mode mode = Mode::Perturbation;
    std::vector<int> nx;
    double v_max = 0.0;
    int nv = 0;
    double time = 0.0;
    long step_index = 0;
    Eigen::MatrixXd values;  // N_v x N_x
    ScalarFieldX phi;        // may be empty
};

struct SnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Snapshot make_snapshot(const RunConfig& cfg, const SimState& s);
void write_snapshot(const Snapshot& snap, const std::string& path);
Snapshot read_snapshot(const std::string& path);

// State with the stored field and the potential solved again (stored phi as the Newton guess).
SimState restore_state(const Model& m, const Snapshot& snap);

}  // namespace ivpb::cli
