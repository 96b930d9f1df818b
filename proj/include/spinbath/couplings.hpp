#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "spinbath/donor.hpp"
#include "spinbath/lattice.hpp"

namespace spinbath {

struct HyperfineModel {
    double eta = 186.0;
    double a = 25.09;           // angstrom
    double b = 14.43;           // angstrom
    double k0 = 0.85 * 2.0 * constants::pi / constants::a0_angstrom;  // 1/angstrom
    double n_factor = 1.0;      // sqrt(0.029 eV / eps_i)
    double r0 = 20.0;           // angstrom, residual dipolar onset
    double normalization = 1.0; // frozen calibration factor on top of eta

    static HyperfineModel for_donor(const DonorParameters& p);
};

// Secular dipolar strength C; Ising term +C IzIz, flip-flop -C/4 (I+I- + I-I+).
double secular_dipolar(double gamma1, double gamma2, const Eigen::Vector3d& r_angstrom,
                       const Eigen::Vector3d& b_direction);

// Full dipolar tensor D_ij in rad s^-1.
Eigen::Matrix3d dipolar_tensor(double gamma1, double gamma2, const Eigen::Vector3d& r_angstrom);

double fermi_contact(const HyperfineModel& m, double gamma_e, double gamma_n, const Eigen::Vector3d& r_angstrom);

// Ising coefficient of Sz Iz.
double secular_hyperfine(const HyperfineModel& m, double gamma_e, double gamma_n, const Eigen::Vector3d& r_angstrom,
                         const Eigen::Vector3d& b_direction);

// Flip-flop coefficient J1 J2 / (gamma_e B) added to C12 in pair models.
double rkky_correction(double J1, double J2, double gamma_e, double B);

// CSV rows n1,n2,n3,J_Mrad_s.
void write_couplings_csv(const std::vector<LatticeSite>& sites, const std::vector<double>& j, const std::string& path);

}  // namespace spinbath
