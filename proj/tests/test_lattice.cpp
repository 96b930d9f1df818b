#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "spinbath/couplings.hpp"
#include "spinbath/lattice.hpp"

using namespace spinbath;

TEST_CASE("one cell gives 64 sites on the diamond lattice") {
    const auto sites = generate_sites(1);
    CHECK(sites.size() == 64);
    CHECK(std::is_sorted(sites.begin(), sites.end()));
    for (const auto& s : sites) CHECK(is_lattice_site(s.n));
    CHECK(generate_sites(2).size() == 512);
    CHECK(!is_lattice_site({1, 0, 0}));
    CHECK(is_lattice_site({1, 1, 3}));
    CHECK(is_lattice_site({-1, -1, -1}));
    CHECK(!is_lattice_site({1, 1, 1}));
}

TEST_CASE("neighbour distances") {
    const auto sites = generate_sites_box(6.0);
    std::set<long> d2;
    for (const auto& s : sites) {
        const long r2 = static_cast<long>(s.n[0]) * s.n[0] + static_cast<long>(s.n[1]) * s.n[1] + static_cast<long>(s.n[2]) * s.n[2];
        if (r2 > 0) d2.insert(r2);
    }
    std::vector<long> shells(d2.begin(), d2.end());
    // Quarter-cell units squared: 3, 8, 11, 16 -> sqrt(3)/4 a0, ..., a0.
    REQUIRE(shells.size() >= 4);
    CHECK(shells[0] == 3);
    CHECK(shells[1] == 8);
    CHECK(shells[2] == 11);
    CHECK(shells[3] == 16);
    CHECK(std::sqrt(3.0) / 4.0 * 5.43 == doctest::Approx(2.3514).epsilon(1e-4));
    CHECK(LatticeSite{{4, 0, 0}}.position().norm() == doctest::Approx(5.43));
}

TEST_CASE("box generation respects the half side") {
    const auto sites = generate_sites_box(10.0);
    for (const auto& s : sites) CHECK(s.position().cwiseAbs().maxCoeff() <= 10.0 + 1e-12);
    CHECK(std::is_sorted(sites.begin(), sites.end()));
}

TEST_CASE("populate edge cases and determinism") {
    const auto sites = generate_sites_box(12.0);
    CHECK(populate(sites, 0.0, 1).sites.empty());
    const auto full = populate(sites, 1.0, 1);
    CHECK(full.sites.size() == sites.size() - 1);  // donor site excluded
    for (const auto& s : full.sites) CHECK(!(s.n == IVec3{0, 0, 0}));
    const auto a = populate(sites, 0.3, 42), b = populate(sites, 0.3, 42), c = populate(sites, 0.3, 43);
    CHECK(a.sites == b.sites);
    CHECK(a.initial_states == b.initial_states);
    CHECK(!(a.sites == c.sites));
    for (int s : a.initial_states) CHECK((s == 1 || s == -1));
    CHECK_THROWS_AS(populate(sites, 1.5, 1), std::invalid_argument);
}

TEST_CASE("occupation statistics over 100 seeds") {
    const auto sites = generate_sites_box(15.0);
    const double n = static_cast<double>(sites.size() - 1);
    const double p = 0.0467;
    double total = 0.0;
    long up = 0, occupied = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto b = populate(sites, p, seed);
        total += b.sites.size();
        occupied += b.sites.size();
        for (int s : b.initial_states) up += s > 0;
    }
    const double mean_frac = total / (100.0 * n);
    const double sigma = std::sqrt(p * (1 - p) / (100.0 * n));
    CHECK(std::abs(mean_frac - p) <= 3 * sigma);
    const double up_frac = static_cast<double>(up) / occupied;
    CHECK(std::abs(up_frac - 0.5) <= 3 * std::sqrt(0.25 / occupied));
}

TEST_CASE("natural abundance in a 160 angstrom box gives about 1e4 impurities") {
    const auto b = populate(generate_sites_box(80.0), constants::natural_abundance, 1);
    CHECK(b.sites.size() > 8000);
    CHECK(b.sites.size() < 12000);
}

TEST_CASE("bath CSV round trip") {
    const auto b = populate(generate_sites_box(10.0), 0.2, 9);
    const std::string path = "lattice_roundtrip_test.csv";
    write_bath_csv(b, path);
    const auto r = read_bath_csv(path);
    CHECK(r.sites == b.sites);
    CHECK(r.initial_states == b.initial_states);
    std::remove(path.c_str());
}

TEST_CASE("closed-form shell counts equal brute-force enumeration") {
    for (int N = 1; N <= 3; ++N) {
        const auto brute = brute_force_shell_counts(N);
        const auto c = shell_census(N, 0.0467);
        for (int ns : shell_multiplicities) CHECK(std::abs(static_cast<double>(brute.at(ns)) - c.shells.at(ns)) < 1e-9);
    }
    long sites = 0;
    for (const auto& [ns, count] : brute_force_shell_counts(1)) sites += ns * count;
    CHECK(sites == 94);
}

TEST_CASE("equivalent-pair expectations") {
    const auto c = shell_census(100.0 / 5.43, 0.0467);
    // Frozen from the binomial sum.
    CHECK(c.zeta.at(48) == doctest::Approx(2.46004392).epsilon(1e-8));
    CHECK(c.zeta.at(24) == doctest::Approx(0.60192564).epsilon(1e-8));
    CHECK(c.zeta.at(24) == doctest::Approx(0.6).epsilon(0.02));
    CHECK(c.n_ep == doctest::Approx(14824.0163).epsilon(1e-8));
    // Independent oracle: the binomial mean of k(k-1)/2 is n(n-1)p^2/2.
    for (int ns : shell_multiplicities) CHECK(c.zeta.at(ns) == doctest::Approx(ns * (ns - 1) * 0.0467 * 0.0467 / 2.0));
    const auto zero = shell_census(5.0, 0.0);
    for (int ns : shell_multiplicities) CHECK(zero.zeta.at(ns) == 0.0);
    CHECK(zero.n_ep == 0.0);
    CHECK_THROWS_AS(shell_census(0.5, 0.1), std::invalid_argument);
}

TEST_CASE("pair density sits at 0.2-0.3 per cubic cell") {
    for (double R : {100.0, 200.0, 400.0}) {
        const auto c = shell_census(R / 5.43, 0.0467);
        CHECK(c.density_total >= 0.2);
        CHECK(c.density_total <= 0.31);
    }
}

TEST_CASE("equivalent sites") {
    CHECK(equivalent_sites({{1, 1, 3}}).size() == 12);
    CHECK(equivalent_sites({{-1, -1, -1}}).size() == 4);
    CHECK(equivalent_sites({{2, 2, 0}}).size() == 12);
    CHECK(equivalent_sites({{4, 0, 0}}).size() == 6);
    CHECK(equivalent_sites({{0, 0, 0}}).size() == 1);
    CHECK_THROWS_AS(equivalent_sites({{1, 1, 1}}), std::invalid_argument);

    // Shell of 48 splits into three subgroups of 16 for B along [100].
    LatticeSite s;
    for (const auto& v : generate_sites_box(12.0))
        if (equivalent_sites(v).size() == 48) { s = v; break; }
    const auto all = equivalent_sites(s);
    REQUIRE(all.size() == 48);
    std::set<IVec3> seen;
    int groups = 0;
    for (const auto& v : all) {
        if (seen.count(v.n)) continue;
        const auto sub = equivalent_sites(v, EquivalenceMode::field_restricted, Eigen::Vector3d(1, 0, 0));
        CHECK(sub.size() == 16);
        for (const auto& w : sub) seen.insert(w.n);
        ++groups;
    }
    CHECK(groups == 3);

    // Equivalent sites share the contact coupling.
    const auto hm = HyperfineModel::for_donor(donor_by_name("Bi"));
    const double j0 = fermi_contact(hm, constants::gamma_e, constants::gamma_si29, s.position());
    for (const auto& v : all)
        CHECK(fermi_contact(hm, constants::gamma_e, constants::gamma_si29, v.position()) == doctest::Approx(j0).epsilon(1e-12));
}
