#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinbath/spin_algebra.hpp"

namespace spinbath {

namespace constants {
inline constexpr double gamma_e = 1.7591e11;       // rad s^-1 T^-1
inline constexpr double gamma_si29 = 53.1903e6;    // rad s^-1 T^-1 (magnitude)
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double mu0_over_4pi = 1e-7;       // N A^-2
inline constexpr double a0_angstrom = 5.43;
inline constexpr double natural_abundance = 0.0467;
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

struct DonorParameters {
    std::string name;
    double gamma_e = constants::gamma_e;  // rad s^-1 T^-1
    double gamma_host = 0.0;              // rad s^-1 T^-1, signed
    double spin_host = 0.5;               // I_X
    double hyperfine_A = 0.0;             // rad s^-1
    double ionization_energy = 0.0;       // eV

    double delta() const { return gamma_host / gamma_e; }
    int dimension() const;
    void validate() const;
};

DonorParameters donor_by_name(const std::string& name);
std::vector<std::string> builtin_donor_names();

// key = value lines; gamma_e, gamma_host in M rad s^-1 T^-1, hyperfine_A in M rad s^-1,
// spin_host dimensionless, ionization_energy in eV.
DonorParameters load_donor_file(const std::string& path);
DonorParameters parse_donor_text(const std::string& text, const std::string& name = "custom");

struct AdiabaticState {
    int sign = +1;    // +1 or -1
    double m = 0.0;   // m = m_S + m_I
    int index = 1;    // 1..d ascending in energy
};

AdiabaticState state_from_index(const DonorParameters& p, int i);
int index_from_label(const DonorParameters& p, int sign, double m);

struct DoubletSolution {
    double a = 1.0, b = 0.0;
    double theta = 0.0;
    double R = 0.0, Omega = 0.0, Delta = 0.0;  // units of A
    double epsilon = 0.0;
    double omega0_tilde = 0.0;
    double E_plus = 0.0, E_minus = 0.0;  // rad s^-1
    bool mixed = true;
};

// Product Zeeman basis |m_S, m_I>, electron first, both in descending order.
int zeeman_index(const DonorParameters& p, double mS, double mI);

Mat donor_hamiltonian(const DonorParameters& p, double B);

DoubletSolution doublet_solution(const DonorParameters& p, double B, double m);

struct AnalyticLevel {
    AdiabaticState state;
    DoubletSolution doublet;
    double energy = 0.0;        // rad s^-1
    double polarisation = 0.0;
};

// Levels ordered by index 1..d.
std::vector<AnalyticLevel> analytic_eigensystem(const DonorParameters& p, double B);

double level_energy(const DonorParameters& p, double B, int i);
double polarisation(const DonorParameters& p, double B, int i);
double expectation_iz(const DonorParameters& p, double B, int i);
Vec analytic_eigenvector(const DonorParameters& p, double B, int i);

double transition_frequency(const DonorParameters& p, double B, int u, int l);  // Hz
double df_dB(const DonorParameters& p, double B, int u, int l);                 // Hz T^-1

struct RootScan {
    double step = 1e-3;  // T; each bracket is then bisected to machine precision
};

std::vector<double> find_owps(const DonorParameters& p, int u, int l, double b_lo, double b_hi,
                              const RootScan& scan = {});
std::optional<double> find_owp(const DonorParameters& p, int u, int l, double b_lo, double b_hi,
                               const RootScan& scan = {});
std::vector<double> find_clock_transitions(const DonorParameters& p, int u, int l, double b_lo,
                                           double b_hi, const RootScan& scan = {});

// Field where Omega_m vanishes.
double cancellation_resonance(const DonorParameters& p, double m);

double transition_amplitude(const DonorParameters& p, double B, int u, int l);

double rabi_probability(double nu1, double nu, double nuB, double t, double t0);

struct EsrLine {
    int u = 0, l = 0;
    double field = 0.0;  // T
};

// ESR-type transitions |+,m> <-> |-,m-1> (high-field selection rule dm_S = 1, dm_I = 0)
// resonant at the given frequency for fields in (b_lo, b_hi].
std::vector<EsrLine> esr_resonances(const DonorParameters& p, double frequency_hz, double b_lo,
                                    double b_hi, const RootScan& scan = {});

}  // namespace spinbath
