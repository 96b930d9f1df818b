#include "spinbath/couplings.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace spinbath {

namespace {

constexpr double angstrom = 1e-10;

}  // namespace

HyperfineModel HyperfineModel::for_donor(const DonorParameters& p) {
    if (!(p.ionization_energy > 0.0)) throw std::invalid_argument("hyperfine model: ionization energy must be positive");
    HyperfineModel m;
    m.n_factor = std::sqrt(0.029 / p.ionization_energy);
    return m;
}

double secular_dipolar(double gamma1, double gamma2, const Eigen::Vector3d& r_angstrom,
                       const Eigen::Vector3d& b_direction) {
    const double r = r_angstrom.norm();
    if (!(r > 0.0)) throw std::invalid_argument("secular_dipolar: zero separation");
    const double c = r_angstrom.dot(b_direction.normalized()) / r;
    const double rm = r * angstrom;
    return constants::mu0_over_4pi * gamma1 * gamma2 * constants::hbar * (1.0 - 3.0 * c * c) / (rm * rm * rm);
}

Eigen::Matrix3d dipolar_tensor(double gamma1, double gamma2, const Eigen::Vector3d& r_angstrom) {
    const double r = r_angstrom.norm();
    if (!(r > 0.0)) throw std::invalid_argument("dipolar_tensor: zero separation");
    const double rm = r * angstrom;
    const double pre = constants::mu0_over_4pi * gamma1 * gamma2 * constants::hbar / (rm * rm * rm);
    const Eigen::Vector3d u = r_angstrom / r;
    return pre * (Eigen::Matrix3d::Identity() - 3.0 * u * u.transpose());
}

double fermi_contact(const HyperfineModel& m, double gamma_e, double gamma_n, const Eigen::Vector3d& r) {
    const double na = m.n_factor * m.a;
    const double nb = m.n_factor * m.b;
    const double norm = 1.0 / std::sqrt(constants::pi * na * na * nb);
    const double x = r.x(), y = r.y(), z = r.z();
    auto envelope = [&](double p, double q, double s) {
        return norm * std::exp(-std::sqrt(p * p / (nb * nb) + (q * q + s * s) / (na * na)));
    };
    const double bracket = envelope(x, y, z) * std::cos(m.k0 * x) + envelope(y, z, x) * std::cos(m.k0 * y) +
                           envelope(z, x, y) * std::cos(m.k0 * z);
    const double density = bracket * bracket / (angstrom * angstrom * angstrom);  // m^-3
    const double mu0 = 4.0 * constants::pi * constants::mu0_over_4pi;
    return (4.0 / 9.0) * m.eta * m.normalization * gamma_e * gamma_n * constants::hbar * mu0 * density;
}

double secular_hyperfine(const HyperfineModel& m, double gamma_e, double gamma_n, const Eigen::Vector3d& r,
                         const Eigen::Vector3d& b_direction) {
    double j = fermi_contact(m, gamma_e, gamma_n, r);
    if (r.norm() > m.r0) j -= secular_dipolar(gamma_n, gamma_e, r, b_direction);
    return j;
}

double rkky_correction(double J1, double J2, double gamma_e, double B) {
    if (!(B > 0.0)) throw std::invalid_argument("rkky_correction: B must be positive");
    return J1 * J2 / (gamma_e * B);
}

void write_couplings_csv(const std::vector<LatticeSite>& sites, const std::vector<double>& j, const std::string& path) {
    if (sites.size() != j.size()) throw std::invalid_argument("write_couplings_csv: size mismatch");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "n1,n2,n3,J_Mrad_s\n";
    for (size_t i = 0; i < sites.size(); ++i)
        f << sites[i].n[0] << ',' << sites[i].n[1] << ',' << sites[i].n[2] << ',' << j[i] * 1e-6 << '\n';
}

}  // namespace spinbath
