#include "spinbath/pseudospin.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace spinbath {

PairFrequencies pair_frequencies(const PseudospinPair& pair) {
    PairFrequencies f;
    const double xu = pair.p_u * pair.delta_j;
    const double xl = pair.p_l * pair.delta_j;
    f.omega_u = 0.25 * std::hypot(pair.c12, xu);
    f.omega_l = 0.25 * std::hypot(pair.c12, xl);
    f.theta_u = std::atan2(pair.c12, xu);
    f.theta_l = std::atan2(pair.c12, xl);
    return f;
}

Mat conditional_hamiltonian(const PseudospinPair& pair, bool upper) {
    const double p = upper ? pair.p_u : pair.p_l;
    Mat h(2, 2);
    h << -0.25 * p * pair.delta_j, -0.25 * pair.c12, -0.25 * pair.c12, 0.25 * p * pair.delta_j;
    return h;
}

namespace {

struct FidAmplitudes {
    double d_plus, d_minus, r_plus, r_minus, omega_plus, omega_minus;
};

FidAmplitudes fid_amplitudes(const PseudospinPair& pair) {
    const PairFrequencies f = pair_frequencies(pair);
    const double tp = 0.5 * (f.theta_u + f.theta_l);
    const double tm = 0.5 * (f.theta_u - f.theta_l);
    FidAmplitudes a;
    a.r_plus = 0.5 * std::sin(tm) * (std::sin(tm) - std::sin(tp));
    a.r_minus = 0.5 * std::sin(tm) * (std::sin(tm) + std::sin(tp));
    a.d_plus = 0.5 * std::cos(tm) * (std::cos(tm) + std::cos(tp));
    a.d_minus = 0.5 * std::cos(tm) * (std::cos(tm) - std::cos(tp));
    a.omega_plus = f.omega_u + f.omega_l;
    a.omega_minus = f.omega_u - f.omega_l;
    return a;
}

}  // namespace

cplx fid_pair_decay(const PseudospinPair& pair, double t) {
    const FidAmplitudes a = fid_amplitudes(pair);
    return a.d_plus * std::polar(1.0, -a.omega_minus * t) + a.d_minus * std::polar(1.0, a.omega_minus * t) +
           a.r_plus * std::polar(1.0, -a.omega_plus * t) + a.r_minus * std::polar(1.0, a.omega_plus * t);
}

double fid_fast_envelope_sq(const PseudospinPair& pair, double t) {
    const FidAmplitudes a = fid_amplitudes(pair);
    const double s1 = std::sin(0.5 * a.omega_plus * t);
    const double s2 = std::sin(a.omega_plus * t);
    return 1.0 - 4.0 * (a.d_plus + a.d_minus) * (a.r_plus + a.r_minus) * s1 * s1 - 4.0 * a.r_plus * a.r_minus * s2 * s2;
}

double fid_slow_envelope_sq(const PseudospinPair& pair, double t) {
    const FidAmplitudes a = fid_amplitudes(pair);
    const double s = std::sin(a.omega_minus * t);
    return 1.0 - 4.0 * a.d_plus * a.d_minus * s * s;
}

CpmgAVector cpmg_a_vector(const PseudospinPair& pair, double tau) {
    const PairFrequencies f = pair_frequencies(pair);
    const double su = std::sin(f.omega_u * tau), cu = std::cos(f.omega_u * tau);
    const double sl = std::sin(f.omega_l * tau), cl = std::cos(f.omega_l * tau);
    CpmgAVector a;
    a.a0 = cu * cl - su * sl * std::cos(f.theta_u - f.theta_l);
    a.ax = sl * cu * std::sin(f.theta_l) + cl * su * std::sin(f.theta_u);
    a.ay = -su * sl * std::sin(f.theta_u - f.theta_l);
    a.az = sl * cu * std::cos(f.theta_l) + cl * su * std::cos(f.theta_u);
    return a;
}

double hahn_pair_decay(const PseudospinPair& pair, double tau) {
    const CpmgAVector a = cpmg_a_vector(pair, tau);
    const double l2 = 1.0 - 4.0 * a.ay * a.ay * (a.a0 * a.a0 + a.az * a.az);
    return std::sqrt(std::max(0.0, l2));
}

double cpmg_even_decay(const PseudospinPair& pair, int n_pulses, double tau) {
    if (n_pulses < 2 || n_pulses % 2 != 0) throw std::invalid_argument("cpmg_even_decay: N must be even and >= 2");
    const CpmgAVector a = cpmg_a_vector(pair, tau);
    const double norm = a.ay * a.ay + a.a0 * a.a0;
    if (norm == 0.0) return 1.0;
    const double cos_phi = std::clamp(cpmg_a_vector(pair, 2.0 * tau).a0, -1.0, 1.0);
    const double phi = std::acos(cos_phi);
    const double s = std::sin(0.5 * n_pulses * phi);
    return 1.0 - 2.0 * a.ay * a.ay / norm * s * s;
}

double cpmg2_envelope_sq(const PseudospinPair& pair, double tau) {
    const CpmgAVector a = cpmg_a_vector(pair, tau);
    return 1.0 - 64.0 * a.ay * a.ay * a.a0 * a.a0 * std::pow(a.ax, 4);
}

double pair_t2_weight(const PseudospinPair& pair) {
    const PairFrequencies f = pair_frequencies(pair);
    return 0.5 * std::abs(std::sin(f.theta_u) - std::sin(f.theta_l)) * 0.5 * (f.omega_u + f.omega_l);
}

double total_t2(const std::vector<double>& weights) {
    double acc = 0.0;
    for (double w : weights) acc += w * w;
    if (!(acc > 0.0)) throw std::invalid_argument("total_t2: need at least one positive weight");
    return 1.0 / std::sqrt(acc);
}

double hahn_fid_factor(double p_u, double p_l, double threshold) {
    return std::abs(p_u - p_l) < threshold * (std::abs(p_u) + std::abs(p_l)) ? 2.0 : 1.0;
}

T2FormulaResult t2_formula(double p_u, double p_l, double prefactor, bool hahn, double threshold) {
    if (!(prefactor > 0.0)) throw std::invalid_argument("t2_formula: prefactor must be positive");
    T2FormulaResult r;
    r.hahn_factor = hahn ? hahn_fid_factor(p_u, p_l, threshold) : 1.0;
    const double diff = std::abs(p_u - p_l);
    if (diff == 0.0) {
        r.at_owp = true;
        r.t2 = std::numeric_limits<double>::infinity();
        return r;
    }
    r.t2 = r.hahn_factor * prefactor * (std::abs(p_u) + std::abs(p_l)) / diff;
    return r;
}

double prefactor_from_couplings(const std::vector<double>& c12) {
    double acc = 0.0;
    for (double c : c12) acc += c * c;
    if (!(acc > 0.0)) throw std::invalid_argument("prefactor: no nonzero couplings");
    return 4.0 / std::sqrt(acc);
}

cplx nuclear_pair_decay(const PseudospinPair& pair, double tau) {
    const double dn = pair.state_detuning;
    const double dp = pair.electron_detuning + dn;
    const double dm = pair.electron_detuning - dn;
    const double wp = 0.25 * std::hypot(dp, pair.c12);
    const double wm = 0.25 * std::hypot(dm, pair.c12);
    const double thp = std::atan2(pair.c12, dp);
    const double thm = std::atan2(pair.c12, dm);
    const double alpha = std::sin(wp * tau) * std::sin(wm * tau) * std::sin(thp - thm);
    const double beta = std::sin(wp * tau) * std::cos(wm * tau) * std::sin(thp) +
                        std::sin(wm * tau) * std::cos(wp * tau) * std::sin(thm);
    return 1.0 - 2.0 * alpha * cplx(alpha, beta);
}

void write_weights_csv(const std::vector<WeightRecord>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "delta_j_rad_s,c12_rad_s,inv_t2_sq_s-2,shell\n";
    for (const auto& r : rows) f << r.delta_j << ',' << r.c12 << ',' << r.inv_t2_sq << ',' << r.shell << '\n';
}

}  // namespace spinbath
