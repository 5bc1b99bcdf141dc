#include "snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ivpb::cli {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw SnapshotError("snapshot '" + path + "' is truncated");
    return v;
}

void get_doubles(std::ifstream& in, double* dst, std::size_t n, const std::string& path) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw SnapshotError("snapshot '" + path + "' is truncated");
}

}  // namespace

Snapshot make_snapshot(const RunConfig& cfg, const SimState& s) {
    Snapshot snap;
    snap.mode = s.field.mode;
    snap.nx = cfg.nx;
    snap.v_max = cfg.v_max;
    snap.nv = cfg.nv;
    snap.time = s.time;
    snap.step_index = s.step_index;
    snap.values = s.field.values;
    snap.phi = s.potential.phi;
    return snap;
}

void write_snapshot(const Snapshot& snap, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open '" + path + "' for writing");
    out.write(kSnapshotMagic, sizeof kSnapshotMagic);
    put<std::uint32_t>(out, kSnapshotVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(snap.mode));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.nx.size()));
    for (int n : snap.nx) put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
    put<double>(out, snap.v_max);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.nv));
    put<double>(out, snap.time);
    put<std::int64_t>(out, snap.step_index);
    out.write(reinterpret_cast<const char*>(snap.values.data()),
              static_cast<std::streamsize>(snap.values.size() * sizeof(double)));
    put<std::uint8_t>(out, snap.phi.size() ? 1 : 0);
    if (snap.phi.size())
        out.write(reinterpret_cast<const char*>(snap.phi.data()),
                  static_cast<std::streamsize>(snap.phi.size() * sizeof(double)));
    if (!out) throw SnapshotError("write to '" + path + "' failed");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open snapshot '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
        throw SnapshotError("'" + path + "' is not an IVPBSNAP file");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kSnapshotVersion)
        throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " (expected " +
                            std::to_string(kSnapshotVersion) + ")");
    Snapshot s;
    const auto mode = get<std::uint8_t>(in, path);
    if (mode > 1) throw SnapshotError("snapshot '" + path + "' has an unknown mode byte");
    s.mode = static_cast<Mode>(mode);
    const auto dims = get<std::uint32_t>(in, path);
    if (dims < 1 || dims > 3) throw SnapshotError("snapshot '" + path + "' has " + std::to_string(dims) + " spatial dims");
    std::size_t nx_total = 1;
    for (std::uint32_t i = 0; i < dims; ++i) {
        s.nx.push_back(static_cast<int>(get<std::uint32_t>(in, path)));
        nx_total *= static_cast<std::size_t>(s.nx.back());
    }
    s.v_max = get<double>(in, path);
    s.nv = static_cast<int>(get<std::uint32_t>(in, path));
    s.time = get<double>(in, path);
    s.step_index = static_cast<long>(get<std::int64_t>(in, path));
    const auto nvel = static_cast<Eigen::Index>(s.nv) * s.nv * s.nv;
    s.values.resize(nvel, static_cast<Eigen::Index>(nx_total));
    get_doubles(in, s.values.data(), static_cast<std::size_t>(s.values.size()), path);
    if (get<std::uint8_t>(in, path)) {
        s.phi.resize(static_cast<Eigen::Index>(nx_total));
        get_doubles(in, s.phi.data(), nx_total, path);
    }
    return s;
}

SimState restore_state(const Model& m, const Snapshot& snap) {
    const RunConfig& cfg = m.config();
    if (snap.nx != cfg.nx || snap.nv != cfg.nv || snap.v_max != cfg.v_max)
        throw SnapshotError("snapshot grid does not match the configured grid");
    if (snap.mode != cfg.mode) throw SnapshotError("snapshot mode does not match time.mode");
    SimState s;
    s.field.mode = snap.mode;
    s.field.values = snap.values;
    s.time = snap.time;
    s.step_index = snap.step_index;
    s.potential = solve_potential(m, s.field, snap.phi.size() ? &snap.phi : nullptr);
    return s;
}

}  // namespace ivpb::cli
