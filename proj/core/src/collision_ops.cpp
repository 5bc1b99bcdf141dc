#include "ivpb/collision_ops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ivpb/macro_micro.hpp"

namespace ivpb {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

std::vector<double> kink_weights(int order) {
    // zeta(-1), zeta(-3), ..., zeta(-11)
    static constexpr double zeta_odd[6] = {-1.0 / 12.0, 1.0 / 120.0,  -1.0 / 252.0,
                                           1.0 / 240.0, -1.0 / 132.0, 691.0 / 32760.0};
    if (order < 0 || order > 5) throw std::invalid_argument("collision.kink_order must be in [0, 5]");
    const int p = order + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd b(p);
    for (int i = 0; i < p; ++i) {
        A(i, 0) = i == 0 ? 1.0 : 0.0;
        for (int k = 1; k < p; ++k) A(i, k) = 2.0 * std::pow(double(k), 2 * i);
        b[i] = -2.0 * zeta_odd[i];
    }
    const Eigen::VectorXd c = A.fullPivLu().solve(b);
    return {c.data(), c.data() + p};
}

namespace {

// sqrt(2 pi) E|X|, X ~ N(s, 1)
double abs_mean(double s) {
    const double pi = std::numbers::pi;
    return std::sqrt(2.0 * pi) * (s * std::erf(s / std::sqrt(2.0)) + std::sqrt(2.0 / pi) * std::exp(-0.5 * s * s));
}

LatticeDirection make_direction(const VelocityGrid& vg, const std::array<int, 3>& m, double weight) {
    const int n = vg.n();
    LatticeDirection d;
    d.step = m;
    d.norm = std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
    d.weight = weight;
    const Eigen::Index N = static_cast<Eigen::Index>(vg.size());
    d.s.resize(N);
    d.plane.resize(N);
    int lo = 0, hi = 0;
    for (int a = 0; a < 3; ++a) (m[a] < 0 ? lo : hi) += m[a] * (n - 1);
    d.planes = hi - lo + 1;
    auto inside = [n](int i, int j, int k) { return i >= 0 && j >= 0 && k >= 0 && i < n && j < n && k < n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const std::size_t q = vg.index(i, j, k);
                const auto& v = vg.nodes()[q];
                d.s[q] = (v[0] * m[0] + v[1] * m[1] + v[2] * m[2]) / d.norm;
                d.plane[q] = i * m[0] + j * m[1] + k * m[2] - lo;
                if (inside(i - m[0], j - m[1], k - m[2])) continue;
                d.chain_start.push_back(static_cast<int>(d.chain_nodes.size()));
                for (int a = i, b = j, c = k; inside(a, b, c); a += m[0], b += m[1], c += m[2])
                    d.chain_nodes.push_back(static_cast<int>(vg.index(a, b, c)));
            }
    d.chain_start.push_back(static_cast<int>(d.chain_nodes.size()));
    return d;
}

// Toeplitz sum along each line: out[a] = sum_b w[|a-b|] x[b]
void line_sum(const LatticeDirection& d, const std::vector<double>& w, const double* x, double* out,
              std::vector<double>& buf) {
    for (std::size_t c = 0; c + 1 < d.chain_start.size(); ++c) {
        const int* nodes = d.chain_nodes.data() + d.chain_start[c];
        const int L = d.chain_start[c + 1] - d.chain_start[c];
        buf.resize(L);
        for (int b = 0; b < L; ++b) buf[b] = x[nodes[b]];
        for (int a = 0; a < L; ++a) {
            double acc = 0.0;
            for (int b = 0; b < L; ++b) acc += w[std::abs(a - b)] * buf[b];
            out[nodes[a]] = acc;
        }
    }
}

}  // namespace

CollisionKernel::CollisionKernel(const VelocityGrid& vg, const SphereQuadrature& sphere, const CollisionParams& p,
                                 Mode mode)
    : vg_(vg), sphere_(sphere), params_(p), mode_(mode) {
    if (sphere.steps.size() != sphere.size()) throw std::invalid_argument("sphere rule has no lattice steps");
    const std::vector<double> c = kink_weights(p.kink_order);
    const double h = vg.h();
    const int n = vg.n();
    // omega and -omega give identical contributions: keep one of each pair with doubled weight
    for (std::size_t i = 0; i < sphere.size(); ++i) {
        const auto& m = sphere.steps[i];
        const std::array<int, 3> neg{-m[0], -m[1], -m[2]};
        if (m < neg) continue;
        dirs_.push_back(make_direction(vg, m, 2.0 * sphere.weights[i]));
        const double H = h * dirs_.back().norm;
        const double dt = h / dirs_.back().norm;
        std::vector<double> lw(n + 1), pw(dirs_.back().planes);
        for (int k = 0; k <= n; ++k) lw[k] = H * H * (k + (k < int(c.size()) ? c[k] : 0.0));
        for (int k = 0; k < int(pw.size()); ++k) pw[k] = dt * dt * (k + (k < int(c.size()) ? c[k] : 0.0));
        line_w_.push_back(std::move(lw));
        plane_w_.push_back(std::move(pw));
    }
}

void CollisionKernel::gain_and_rate(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2, Eigen::MatrixXd& gain,
                                    Eigen::MatrixXd& rate) const {
    const Eigen::Index N = static_cast<Eigen::Index>(vg_.size());
    if (g1.rows() != N || g2.rows() != N || g1.cols() != g2.cols())
        throw std::invalid_argument("collision kernel: shape mismatch");
    const bool pert = mode_ == Mode::Perturbation;
    const Eigen::VectorXd& sq = vg_.sqrt_mu();
    const double h = vg_.h();
    gain.setZero(N, g1.cols());
    rate.setZero(N, g1.cols());
    const std::size_t nd = dirs_.size();
    std::vector<Eigen::VectorXd> line_fac(nd, Eigen::VectorXd::Ones(N)), gain_fac(nd, Eigen::VectorXd::Ones(N));
    if (pert)
        for (std::size_t di = 0; di < nd; ++di)
            for (Eigen::Index q = 0; q < N; ++q) {
                const double s = dirs_[di].s[q];
                line_fac[di][q] = std::exp(-0.25 * s * s);
                gain_fac[di][q] = std::exp(0.25 * s * s);
            }
    // cells are independent; each entry accumulates over directions in a fixed order
#pragma omp parallel
    {
        std::vector<double> x(N), a(N), R, Rc, buf;
#pragma omp for schedule(static)
        for (Eigen::Index col = 0; col < g1.cols(); ++col) {
            for (std::size_t di = 0; di < nd; ++di) {
                const LatticeDirection& d = dirs_[di];
                const std::vector<double>& lw = line_w_[di];
                const std::vector<double>& pw = plane_w_[di];
                const double area = h * h * d.norm;
                R.assign(d.planes, 0.0);
                for (Eigen::Index q = 0; q < N; ++q) R[d.plane[q]] += (pert ? sq[q] : 1.0) * g1(q, col);
                for (double& r : R) r *= area;
                Rc.assign(d.planes, 0.0);
                for (int p = 0; p < d.planes; ++p) {
                    double acc = 0.0;
                    for (int r = 0; r < d.planes; ++r) acc += pw[std::abs(p - r)] * R[r];
                    Rc[p] = acc;
                }
                for (Eigen::Index q = 0; q < N; ++q) x[q] = line_fac[di][q] * g2(q, col);
                line_sum(d, lw, x.data(), a.data(), buf);
                for (Eigen::Index q = 0; q < N; ++q) {
                    const int p = d.plane[q];
                    gain(q, col) += d.weight * a[q] * gain_fac[di][q] * R[p];
                    rate(q, col) += d.weight * Rc[p];
                }
            }
        }
    }
}

Eigen::MatrixXd CollisionKernel::gain(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2) const {
    Eigen::MatrixXd gn, r;
    gain_and_rate(g1, g2, gn, r);
    return gn;
}

Eigen::MatrixXd CollisionKernel::rate(const Eigen::MatrixXd& g) const {
    Eigen::MatrixXd gn, r;
    gain_and_rate(g, g, gn, r);
    return r;
}

// ---------------------------------------------------------------- tables

double nu_exact(double v) {
    const double pi = std::numbers::pi;
    if (v < 1e-8) return 4.0 * std::sqrt(2.0 * pi);
    return 2.0 * pi *
           ((v + 1.0 / v) * std::erf(v / std::sqrt(2.0)) + std::sqrt(2.0 / pi) * std::exp(-0.5 * v * v));
}

Eigen::VectorXd build_nu_table(const VelocityGrid& vg, const SphereQuadrature& sphere, const CollisionParams& p) {
    CollisionKernel kern(vg, sphere, p, Mode::Perturbation);
    Eigen::MatrixXd sq = vg.sqrt_mu();
    return kern.rate(sq).col(0);
}

// Entries of K per direction, with the sqrt(mu) factors of the linearisation in closed form so
// that every block is symmetric:
//   line  (u on the line of v):  (2 pi)^{-1/2} exp(-(s_v^2 + s_u^2)/4) H^2 (k + c_k)
//   plane (u in the plane of v): (2 pi)^{-3/2} h^2 |m| J(s) exp((2 s^2 - |v|^2 - |u|^2)/4)
//   K1    (all u):               sqrt(mu(v)) sqrt(mu(u)) h^2 |m| dt^2 (k + c_k), k = plane offset
CollisionTables build_K_matrix(const VelocityGrid& vg, const SphereQuadrature& sphere, const CollisionParams& p) {
    CollisionKernel kern(vg, sphere, p, Mode::Perturbation);
    const Eigen::Index N = static_cast<Eigen::Index>(vg.size());
    const Eigen::VectorXd& sq = vg.sqrt_mu();
    const Eigen::VectorXd& v2 = vg.speed_sq();
    const double pi = std::numbers::pi;
    const double h = vg.h();

    CollisionTables out;
    out.v_max = vg.v_max();
    out.n = vg.n();
    out.params = p;
    out.sphere = sphere;
    out.nu = build_nu_table(vg, sphere, p);

    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(N, N);
    const auto& dirs = kern.directions();
    std::vector<std::vector<int>> members;
    Eigen::VectorXd e(N), eps(N);
    for (std::size_t di = 0; di < dirs.size(); ++di) {
        const LatticeDirection& d = dirs[di];
        const std::vector<double>& lw = kern.line_weights(di);
        for (Eigen::Index q = 0; q < N; ++q) {
            e[q] = std::exp(-0.25 * d.s[q] * d.s[q]);
            eps[q] = std::exp(0.25 * (d.s[q] * d.s[q] - v2[q]));
        }
        const double cl = d.weight / std::sqrt(2.0 * pi);
        for (std::size_t c = 0; c + 1 < d.chain_start.size(); ++c) {
            const int* nodes = d.chain_nodes.data() + d.chain_start[c];
            const int L = d.chain_start[c + 1] - d.chain_start[c];
            for (int a = 0; a < L; ++a)
                for (int b = 0; b < L; ++b) k(nodes[b], nodes[a]) += cl * e[nodes[a]] * e[nodes[b]] * lw[std::abs(a - b)];
        }
        members.assign(d.planes, {});
        for (Eigen::Index q = 0; q < N; ++q) members[d.plane[q]].push_back(static_cast<int>(q));
        const double cp = d.weight * std::pow(2.0 * pi, -1.5) * h * h * d.norm;
        for (const auto& mem : members) {
            if (mem.empty()) continue;
            const double J = abs_mean(d.s[mem[0]]);
            for (int u : mem)
                for (int v : mem) k(u, v) += cp * J * eps[u] * eps[v];
        }
    }
    // K1: one pass over pairs, all directions at once
    std::vector<double> pref(dirs.size());
    for (std::size_t di = 0; di < dirs.size(); ++di) pref[di] = dirs[di].weight * h * h * dirs[di].norm;
    for (Eigen::Index v = 0; v < N; ++v)
        for (Eigen::Index u = v; u < N; ++u) {
            double acc = 0.0;
            for (std::size_t di = 0; di < dirs.size(); ++di)
                acc += pref[di] * kern.plane_weights(di)[std::abs(dirs[di].plane[v] - dirs[di].plane[u])];
            acc *= sq[v] * sq[u];
            k(u, v) -= acc;
            if (u != v) k(v, u) -= acc;
        }
    out.k = std::move(k);

    Eigen::VectorXd ex(N);
    for (Eigen::Index q = 0; q < N; ++q) ex[q] = nu_exact(std::sqrt(v2[q]));
    const Eigen::VectorXd k2sq = out.k * sq + out.nu.cwiseProduct(sq);
    out.leakage = 1.0 - k2sq.dot(sq) / (2.0 * ex.cwiseProduct(sq).dot(sq));
    return out;
}

Eigen::VectorXd apply_L(const Eigen::VectorXd& g, const CollisionTables& t) {
    return t.nu.cwiseProduct(g) - t.k * g;
}

Eigen::MatrixXd apply_L(const Eigen::MatrixXd& g, const CollisionTables& t) {
    Eigen::MatrixXd out = t.k * g;
    out = (g.array().colwise() * t.nu.array()).matrix() - out;
    return out;
}

Eigen::MatrixXd gamma(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2, const CollisionKernel& kern) {
    if (kern.mode() != Mode::Perturbation) throw std::invalid_argument("gamma needs a perturbation-mode kernel");
    Eigen::MatrixXd gain, rate;
    kern.gain_and_rate(g1, g2, gain, rate);
    return gain - (g2.array() * rate.array()).matrix();
}

Eigen::VectorXd gamma(const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, const CollisionKernel& kern) {
    Eigen::MatrixXd a = g1, b = g2;
    return gamma(a, b, kern).col(0);
}

PhysicalTerms physical_collision_terms(const Eigen::MatrixXd& F1, const Eigen::MatrixXd& F2,
                                       const CollisionKernel& kern) {
    if (kern.mode() != Mode::Physical) throw std::invalid_argument("physical terms need a physical-mode kernel");
    if (F1.minCoeff() < 0.0 || F2.minCoeff() < 0.0)
        throw std::domain_error("physical collision terms: negative distribution value");
    PhysicalTerms t;
    kern.gain_and_rate(F1, F2, t.q_gain, t.loss_rate);
    return t;
}

Eigen::MatrixXd conserve_project(const Eigen::MatrixXd& out, const VelocityGrid& vg) {
    const NullBasis nb(vg);
    return out - nb.project(out);
}

// ---------------------------------------------------------------- cache

namespace {

constexpr char kTabMagic[8] = {'I', 'V', 'P', 'B', 'K', 'T', 'A', 'B'};
constexpr std::uint32_t kTabVersion = 2;

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("collision table file truncated");
    return v;
}

}  // namespace

void write_tables(const CollisionTables& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.write(kTabMagic, 8);
    put(os, kTabVersion);
    put(os, t.v_max);
    put(os, std::int32_t(t.n));
    put(os, std::int32_t(t.params.sphere_nodes));
    put(os, std::int32_t(t.params.kink_order));
    put(os, t.leakage);
    const std::uint64_t N = static_cast<std::uint64_t>(t.nu.size());
    put(os, N);
    os.write(reinterpret_cast<const char*>(t.nu.data()), std::streamsize(N * sizeof(double)));
    // row-major K; K is symmetric so the column-major buffer is the same bytes
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = t.k;
    os.write(reinterpret_cast<const char*>(rm.data()), std::streamsize(N * N * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

CollisionTables read_tables(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kTabMagic, 8) != 0) throw std::runtime_error("not a collision table file");
    const auto ver = get<std::uint32_t>(is);
    if (ver != kTabVersion) throw std::runtime_error("unsupported collision table version " + std::to_string(ver));
    CollisionTables t;
    t.v_max = get<double>(is);
    t.n = get<std::int32_t>(is);
    t.params.sphere_nodes = get<std::int32_t>(is);
    t.params.kink_order = get<std::int32_t>(is);
    t.leakage = get<double>(is);
    const auto N = get<std::uint64_t>(is);
    t.sphere = lattice_sphere(t.params.sphere_nodes);
    t.nu.resize(static_cast<Eigen::Index>(N));
    is.read(reinterpret_cast<char*>(t.nu.data()), std::streamsize(N * sizeof(double)));
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(N, N);
    is.read(reinterpret_cast<char*>(rm.data()), std::streamsize(N * N * sizeof(double)));
    if (!is) throw std::runtime_error("collision table file truncated");
    t.k = rm;
    return t;
}

CollisionTables load_or_build_tables(const VelocityGrid& vg, const CollisionParams& p, const std::string& cache_dir) {
    std::ostringstream name;
    name << "ktab_v" << vg.v_max() << "_n" << vg.n() << "_s" << p.sphere_nodes << "_k" << p.kink_order << ".bin";
    std::filesystem::path path;
    if (!cache_dir.empty()) {
        path = std::filesystem::path(cache_dir) / name.str();
        if (std::filesystem::exists(path)) {
            CollisionTables t = read_tables(path.string());
            if (t.n == vg.n() && t.v_max == vg.v_max() && t.params == p) return t;
        }
    }
    CollisionTables t = build_K_matrix(vg, lattice_sphere(p.sphere_nodes), p);
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        write_tables(t, path.string());
    }
    return t;
}

}  // namespace ivpb
