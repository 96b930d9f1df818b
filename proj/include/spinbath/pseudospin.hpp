#pragma once

#include <complex>
#include <string>
#include <vector>

#include "spinbath/spin_algebra.hpp"

namespace spinbath {

struct PseudospinPair {
    double c12 = 0.0;               // rad s^-1
    double delta_j = 0.0;           // rad s^-1, J1 - J2
    double p_u = 1.0, p_l = -1.0;
    double electron_detuning = 0.0; // rad s^-1, nuclear-qubit mode
    double state_detuning = 0.0;    // rad s^-1, C1A - C2A, nuclear-qubit mode
};

struct PairFrequencies {
    double omega_u = 0.0, omega_l = 0.0;
    double theta_u = 0.0, theta_l = 0.0;
};

struct CpmgAVector {
    double a0 = 1.0, ax = 0.0, ay = 0.0, az = 0.0;
};

PairFrequencies pair_frequencies(const PseudospinPair& pair);

// -(1/4)(C12 sigma_x + P delta_J sigma_z) on {|down up>, |up down>}.
Mat conditional_hamiltonian(const PseudospinPair& pair, bool upper);

// <down up| U_u^dagger U_l |down up>.
cplx fid_pair_decay(const PseudospinPair& pair, double t);
double fid_fast_envelope_sq(const PseudospinPair& pair, double t);
double fid_slow_envelope_sq(const PseudospinPair& pair, double t);

// Components of the single-cycle unitary T_u = A0 + i A.sigma for free evolution tau on each side.
CpmgAVector cpmg_a_vector(const PseudospinPair& pair, double tau);

// |L| for a Hahn echo of total time 2 tau.
double hahn_pair_decay(const PseudospinPair& pair, double tau);

// Real part of <down up| T_l^dagger T_u |down up> for N (even) pulses with spacing 2 tau.
double cpmg_even_decay(const PseudospinPair& pair, int n_pulses, double tau);
double cpmg2_envelope_sq(const PseudospinPair& pair, double tau);

double pair_t2_weight(const PseudospinPair& pair);
double total_t2(const std::vector<double>& weights);

struct T2FormulaResult {
    double t2 = 0.0;        // s, +inf at an OWP
    bool at_owp = false;
    double hahn_factor = 1.0;
};

inline constexpr double hahn_regime_threshold = 0.2;

double hahn_fid_factor(double p_u, double p_l, double threshold = hahn_regime_threshold);
T2FormulaResult t2_formula(double p_u, double p_l, double prefactor, bool hahn = false,
                           double threshold = hahn_regime_threshold);
double prefactor_from_couplings(const std::vector<double>& c12);

// Hahn echo of the detuned nuclear-qubit pair with half-echo time tau.
cplx nuclear_pair_decay(const PseudospinPair& pair, double tau);

struct WeightRecord {
    double delta_j = 0.0, c12 = 0.0, inv_t2_sq = 0.0;
    int shell = 0;
};

void write_weights_csv(const std::vector<WeightRecord>& rows, const std::string& path);

}  // namespace spinbath
