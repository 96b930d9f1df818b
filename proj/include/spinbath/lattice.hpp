#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinbath {

using IVec3 = std::array<int, 3>;

struct LatticeSite {
    IVec3 n{0, 0, 0};  // quarter-cell units

    Eigen::Vector3d position(double a0 = 5.43) const;  // angstrom
    bool operator==(const LatticeSite& o) const { return n == o.n; }
    bool operator<(const LatticeSite& o) const { return n < o.n; }
};

const std::array<IVec3, 8>& diamond_basis();
bool is_lattice_site(const IVec3& n);

// Sites n = 4c + basis with c in [-N, N-1]^3, i.e. 64 N^3 sites, lexicographic order.
std::vector<LatticeSite> generate_sites(int cells);
// Sites with every |n_i| a0/4 <= half_side, lexicographic order.
std::vector<LatticeSite> generate_sites_box(double half_side_angstrom, double a0 = 5.43);

struct BathRealisation {
    std::vector<LatticeSite> sites;   // occupied, donor site excluded
    std::vector<int> initial_states;  // +1 up, -1 down
    double abundance = 0.0;
    std::uint64_t seed = 0;
    double box_half_side = 0.0;  // angstrom
};

BathRealisation populate(const std::vector<LatticeSite>& sites, double abundance, std::uint64_t seed);

void write_bath_csv(const BathRealisation& bath, const std::string& path);
BathRealisation read_bath_csv(const std::string& path);

struct ShellCensus {
    double N = 0.0;
    double p = 0.0;
    std::map<int, double> shells;        // n_s -> N_{n_s}(N)
    std::map<int, double> zeta;          // n_s -> mean equivalent pairs per shell
    std::map<int, double> density;       // n_s -> D(n_s, N)
    double n_ep = 0.0;
    double density_total = 0.0;
};

inline const std::array<int, 6> shell_multiplicities{48, 24, 12, 8, 6, 4};

// Closed forms; N may be fractional (N = R / a0).
ShellCensus shell_census(double N, double p = 0.0467);
double mean_pairs_in_shell(int n_s, double p);

// Shell counts by explicit enumeration of the cube max|n_i| <= 4N minus the origin.
std::map<int, long> brute_force_shell_counts(int N);

enum class EquivalenceMode { isotropic, field_restricted };

std::vector<LatticeSite> equivalent_sites(const LatticeSite& site, EquivalenceMode mode = EquivalenceMode::isotropic,
                                          const Eigen::Vector3d& field_direction = Eigen::Vector3d(1, 0, 0));

}  // namespace spinbath
