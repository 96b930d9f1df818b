#include "spinbath/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

int mod4(int x) { return ((x % 4) + 4) % 4; }

// The 48 signed permutations of the cube point group.
std::vector<IVec3> cubic_images(const IVec3& n) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<IVec3> out;
    out.reserve(48);
    for (const auto& p : perms)
        for (int s = 0; s < 8; ++s) {
            IVec3 v{n[p[0]], n[p[1]], n[p[2]]};
            for (int k = 0; k < 3; ++k)
                if (s & (1 << k)) v[k] = -v[k];
            out.push_back(v);
        }
    return out;
}

}  // namespace

Eigen::Vector3d LatticeSite::position(double a0) const {
    return Eigen::Vector3d(n[0], n[1], n[2]) * (a0 / 4.0);
}

const std::array<IVec3, 8>& diamond_basis() {
    static const std::array<IVec3, 8> basis{{{0, 0, 0}, {0, 2, 2}, {2, 0, 2}, {2, 2, 0},
                                             {1, 1, 3}, {1, 3, 1}, {3, 1, 1}, {3, 3, 3}}};
    return basis;
}

bool is_lattice_site(const IVec3& n) {
    const IVec3 r{mod4(n[0]), mod4(n[1]), mod4(n[2])};
    for (const auto& b : diamond_basis())
        if (b == r) return true;
    return false;
}

std::vector<LatticeSite> generate_sites(int cells) {
    if (cells < 1) throw std::invalid_argument("generate_sites: need at least one cell");
    std::vector<LatticeSite> out;
    out.reserve(static_cast<size_t>(64) * cells * cells * cells);
    for (int i = -cells; i < cells; ++i)
        for (int j = -cells; j < cells; ++j)
            for (int k = -cells; k < cells; ++k)
                for (const auto& b : diamond_basis())
                    out.push_back({{4 * i + b[0], 4 * j + b[1], 4 * k + b[2]}});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LatticeSite> generate_sites_box(double half_side_angstrom, double a0) {
    if (!(half_side_angstrom > 0.0)) throw std::invalid_argument("generate_sites_box: half side must be positive");
    const int nmax = static_cast<int>(std::floor(4.0 * half_side_angstrom / a0 + 1e-9));
    std::vector<LatticeSite> out;
    for (int x = -nmax; x <= nmax; ++x)
        for (int y = -nmax; y <= nmax; ++y)
            for (int z = -nmax; z <= nmax; ++z)
                if (is_lattice_site({x, y, z})) out.push_back({{x, y, z}});
    return out;
}

BathRealisation populate(const std::vector<LatticeSite>& sites, double abundance, std::uint64_t seed) {
    if (!(abundance >= 0.0 && abundance <= 1.0)) throw std::invalid_argument("populate: abundance outside [0,1]");
    BathRealisation bath;
    bath.abundance = abundance;
    bath.seed = seed;
    std::mt19937_64 gen(seed);
    int nmax = 0;
    for (const auto& s : sites) {
        if (s.n == IVec3{0, 0, 0}) continue;
        for (int k = 0; k < 3; ++k) nmax = std::max(nmax, std::abs(s.n[k]));
        const double occ = uniform01(gen);
        const double spin = uniform01(gen);
        if (occ < abundance) {
            bath.sites.push_back(s);
            bath.initial_states.push_back(spin < 0.5 ? +1 : -1);
        }
    }
    bath.box_half_side = nmax * 5.43 / 4.0;
    return bath;
}

void write_bath_csv(const BathRealisation& bath, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "n1,n2,n3,state\n";
    for (size_t i = 0; i < bath.sites.size(); ++i)
        f << bath.sites[i].n[0] << ',' << bath.sites[i].n[1] << ',' << bath.sites[i].n[2] << ','
          << bath.initial_states[i] << '\n';
}

BathRealisation read_bath_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open bath file: " + path);
    BathRealisation bath;
    std::string line;
    std::getline(f, line);
    std::set<IVec3> seen;
    int nmax = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        IVec3 n{};
        int state = 0;
        char c1, c2, c3;
        if (!(ss >> n[0] >> c1 >> n[1] >> c2 >> n[2] >> c3 >> state) || c1 != ',' || c2 != ',' || c3 != ',')
            throw std::invalid_argument("bad bath line: " + line);
        if (!is_lattice_site(n)) throw std::invalid_argument("not a lattice site: " + line);
        if (state != 1 && state != -1) throw std::invalid_argument("state must be +1 or -1: " + line);
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate site: " + line);
        for (int k = 0; k < 3; ++k) nmax = std::max(nmax, std::abs(n[k]));
        bath.sites.push_back({n});
        bath.initial_states.push_back(state);
    }
    bath.box_half_side = nmax * 5.43 / 4.0;
    return bath;
}

double mean_pairs_in_shell(int n_s, double p) {
    double acc = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n_s; ++k) {
        if (k > 0) binom = binom * (n_s - k + 1) / k;
        acc += binom * std::pow(p, k) * std::pow(1.0 - p, n_s - k) * 0.5 * k * (k - 1);
    }
    return acc;
}

ShellCensus shell_census(double N, double p) {
    if (!(N >= 1.0)) throw std::invalid_argument("shell_census: N must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("shell_census: p outside [0,1]");
    ShellCensus c;
    c.N = N;
    c.p = p;
    c.shells[12] = 4.0 * N * N;
    c.shells[24] = 4.0 / 3.0 * N * (N * N - 1.0) + N * N;
    c.shells[48] = 2.0 / 3.0 * N * N * N - N * N + N / 3.0;
    c.shells[8] = N;
    c.shells[6] = N;
    c.shells[4] = 2.0 * N;
    const double cells = std::pow(2.0 * N, 3);
    for (int ns : shell_multiplicities) {
        c.zeta[ns] = mean_pairs_in_shell(ns, p);
        c.n_ep += c.zeta[ns] * c.shells[ns];
        c.density[ns] = c.zeta[ns] * c.shells[ns] / cells;
        c.density_total += c.density[ns];
    }
    return c;
}

std::map<int, long> brute_force_shell_counts(int N) {
    if (N < 1) throw std::invalid_argument("brute_force_shell_counts: N must be >= 1");
    const int nmax = 4 * N;
    std::set<IVec3> visited;
    std::map<int, long> counts;
    for (int ns : shell_multiplicities) counts[ns] = 0;
    for (int x = -nmax; x <= nmax; ++x)
        for (int y = -nmax; y <= nmax; ++y)
            for (int z = -nmax; z <= nmax; ++z) {
                const IVec3 n{x, y, z};
                if (n == IVec3{0, 0, 0} || !is_lattice_site(n) || visited.count(n)) continue;
                const auto orbit = equivalent_sites({n});
                for (const auto& s : orbit) visited.insert(s.n);
                counts[static_cast<int>(orbit.size())] += 1;
            }
    return counts;
}

std::vector<LatticeSite> equivalent_sites(const LatticeSite& site, EquivalenceMode mode,
                                          const Eigen::Vector3d& field_direction) {
    if (!is_lattice_site(site.n)) throw std::invalid_argument("equivalent_sites: not a lattice site");
    std::set<IVec3> images;
    for (const auto& v : cubic_images(site.n))
        if (is_lattice_site(v)) images.insert(v);
    std::vector<LatticeSite> out;
    if (mode == EquivalenceMode::isotropic) {
        for (const auto& v : images) out.push_back({v});
        return out;
    }
    const Eigen::Vector3d b = field_direction.normalized();
    auto proj2 = [&](const IVec3& v) {
        const double d = b.x() * v[0] + b.y() * v[1] + b.z() * v[2];
        return d * d;
    };
    const double ref = proj2(site.n);
    const double tol = 1e-9 * std::max(1.0, ref);
    for (const auto& v : images)
        if (std::abs(proj2(v) - ref) <= tol) out.push_back({v});
    return out;
}

}  // namespace spinbath
