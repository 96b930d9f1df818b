#include "spinbath/donor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace spinbath {

namespace {

bool is_half_integer(double x) {
    const double twice = 2.0 * x;
    return std::abs(twice - std::round(twice)) < 1e-9;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename F>
std::vector<double> scan_roots(F&& g, double b_lo, double b_hi, double step) {
    std::vector<double> roots;
    if (!(b_hi > b_lo) || !(step > 0.0) || !std::isfinite(b_lo) || !std::isfinite(b_hi)) return roots;
    const long n = static_cast<long>(std::ceil((b_hi - b_lo) / step));
    double x0 = b_lo;
    double g0 = g(x0);
    if (g0 == 0.0) roots.push_back(x0);
    for (long k = 1; k <= n; ++k) {
        const double x1 = std::min(b_lo + k * step, b_hi);
        const double g1 = g(x1);
        if (g1 == 0.0) {
            roots.push_back(x1);
        } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            double lo = x0, hi = x1, glo = g0;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi);
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

}  // namespace

int DonorParameters::dimension() const {
    return static_cast<int>(std::lround(4.0 * spin_host)) + 2;
}

void DonorParameters::validate() const {
    if (!is_half_integer(spin_host) || spin_host <= 0.0)
        throw std::invalid_argument("donor: spin_host must be a positive half-integer");
    if (!(hyperfine_A > 0.0)) throw std::invalid_argument("donor: hyperfine_A must be positive");
    if (!(gamma_e > 0.0)) throw std::invalid_argument("donor: gamma_e must be positive");
    if (!(std::abs(delta()) < 1.0)) throw std::invalid_argument("donor: |delta| must be < 1");
}

DonorParameters donor_by_name(const std::string& name) {
    DonorParameters p;
    p.name = name;
    if (name == "P") {
        p.gamma_host = -108.41e6; p.spin_host = 0.5; p.hyperfine_A = 738.46e6; p.ionization_energy = 0.044;
    } else if (name == "As") {
        p.gamma_host = -45.95e6; p.spin_host = 1.5; p.hyperfine_A = 1246.7e6; p.ionization_energy = 0.049;
    } else if (name == "Sb") {
        p.gamma_host = -64.44e6; p.spin_host = 2.5; p.hyperfine_A = 1174.0e6; p.ionization_energy = 0.040;
    } else if (name == "Bi") {
        p.gamma_host = -43.775e6; p.spin_host = 4.5; p.hyperfine_A = 9270.2e6; p.ionization_energy = 0.069;
    } else {
        throw std::invalid_argument("unknown donor: " + name);
    }
    return p;
}

std::vector<std::string> builtin_donor_names() { return {"P", "As", "Sb", "Bi"}; }

DonorParameters parse_donor_text(const std::string& text, const std::string& name) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("donor file line " + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto number = [&](const std::string& key, bool required, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw std::invalid_argument("donor file: missing key " + key);
            return fallback;
        }
        try {
            size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("donor file: bad number for " + key);
        }
    };
    DonorParameters p;
    p.name = kv.count("name") ? kv["name"] : name;
    p.gamma_e = number("gamma_e", false, constants::gamma_e / 1e6) * 1e6;
    p.gamma_host = number("gamma_host", true, 0.0) * 1e6;
    p.spin_host = number("spin_host", true, 0.0);
    p.hyperfine_A = number("hyperfine_A", true, 0.0) * 1e6;
    p.ionization_energy = number("ionization_energy", true, 0.0);
    p.validate();
    return p;
}

DonorParameters load_donor_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open donor file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_donor_text(ss.str(), path);
}

AdiabaticState state_from_index(const DonorParameters& p, int i) {
    const int d = p.dimension();
    if (i < 1 || i > d) throw std::invalid_argument("level index out of range");
    const double I = p.spin_host;
    AdiabaticState s;
    s.index = i;
    s.sign = (i >= 2.0 * I + 2.0) ? +1 : -1;
    s.m = std::abs(2.0 * I + 1.0 - i) - 0.5 - I;
    return s;
}

int index_from_label(const DonorParameters& p, int sign, double m) {
    const double I = p.spin_host;
    if (!is_half_integer(m)) throw std::invalid_argument("bad m");
    double i = 0.0;
    if (sign > 0) {
        if (m < -I + 0.5 - 1e-9 || m > I + 0.5 + 1e-9) throw std::invalid_argument("m out of range for + branch");
        i = 3.0 * I - 0.5 + 2.0 + m;
    } else {
        if (m < -I - 0.5 - 1e-9 || m > I - 0.5 + 1e-9) throw std::invalid_argument("m out of range for - branch");
        i = 0.5 + I - m;
    }
    return static_cast<int>(std::lround(i));
}

int zeeman_index(const DonorParameters& p, double mS, double mI) {
    const int nI = static_cast<int>(std::lround(2.0 * p.spin_host)) + 1;
    const int e = mS > 0.0 ? 0 : 1;
    const int n = static_cast<int>(std::lround(p.spin_host - mI));
    if (n < 0 || n >= nI) throw std::invalid_argument("zeeman_index: m_I out of range");
    return e * nI + n;
}

Mat donor_hamiltonian(const DonorParameters& p, double B) {
    const SpinOperatorSet S = build_spin_operators(0.5);
    const SpinOperatorSet I = build_spin_operators(p.spin_host);
    const Mat idS = Mat::Identity(2, 2);
    const Mat idI = Mat::Identity(I.dimension, I.dimension);
    const double w0 = p.gamma_e * B;
    Mat h = w0 * (kron(S.sz, idI) + p.delta() * kron(idS, I.sz));
    h += p.hyperfine_A * (kron(S.sx, I.sx) + kron(S.sy, I.sy) + kron(S.sz, I.sz));
    return h;
}

DoubletSolution doublet_solution(const DonorParameters& p, double B, double m) {
    const double I = p.spin_host;
    const double A = p.hyperfine_A;
    const double delta = p.delta();
    DoubletSolution s;
    s.omega0_tilde = p.gamma_e * B / A;
    const double w = s.omega0_tilde;
    if (std::abs(m) > I + 0.5 + 1e-9) throw std::invalid_argument("doublet: |m| > I + 1/2");
    if (std::abs(std::abs(m) - (I + 0.5)) < 1e-9) {
        s.mixed = false;
        s.a = 1.0;
        s.b = 0.0;
        s.theta = m > 0 ? 0.0 : constants::pi;
        const double e = 0.5 * p.gamma_e * B * (1.0 + 2.0 * delta * I);
        s.E_plus = (m > 0 ? e : -e) + A * I / 2.0;
        s.E_minus = s.E_plus;
        s.Omega = m > 0 ? 1.0 : -1.0;
        s.R = 1.0;
        s.epsilon = 0.0;
        return s;
    }
    s.Omega = m + w * (1.0 - delta);
    s.Delta = std::sqrt((I + 0.5) * (I + 0.5) - m * m);
    s.R = std::hypot(s.Omega, s.Delta);
    s.theta = std::atan2(s.Delta, s.Omega);
    s.a = std::cos(0.5 * s.theta);
    s.b = std::sin(0.5 * s.theta);
    s.epsilon = 0.5 * (1.0 - 4.0 * w * m * delta);
    s.E_plus = 0.5 * A * (-s.epsilon + s.R);
    s.E_minus = 0.5 * A * (-s.epsilon - s.R);
    return s;
}

std::vector<AnalyticLevel> analytic_eigensystem(const DonorParameters& p, double B) {
    const int d = p.dimension();
    std::vector<AnalyticLevel> out;
    out.reserve(d);
    for (int i = 1; i <= d; ++i) {
        AnalyticLevel lv;
        lv.state = state_from_index(p, i);
        lv.doublet = doublet_solution(p, B, lv.state.m);
        if (!lv.doublet.mixed) {
            lv.energy = lv.doublet.E_plus;
            lv.polarisation = lv.state.sign;
        } else {
            lv.energy = lv.state.sign > 0 ? lv.doublet.E_plus : lv.doublet.E_minus;
            lv.polarisation = lv.state.sign * std::cos(lv.doublet.theta);
        }
        out.push_back(lv);
    }
    return out;
}

double level_energy(const DonorParameters& p, double B, int i) {
    const AdiabaticState s = state_from_index(p, i);
    const DoubletSolution d = doublet_solution(p, B, s.m);
    if (!d.mixed) return d.E_plus;
    return s.sign > 0 ? d.E_plus : d.E_minus;
}

double polarisation(const DonorParameters& p, double B, int i) {
    const AdiabaticState s = state_from_index(p, i);
    const DoubletSolution d = doublet_solution(p, B, s.m);
    if (!d.mixed) return s.sign;
    return s.sign * d.Omega / d.R;
}

double expectation_iz(const DonorParameters& p, double B, int i) {
    const AdiabaticState s = state_from_index(p, i);
    return s.m - 0.5 * polarisation(p, B, i);
}

Vec analytic_eigenvector(const DonorParameters& p, double B, int i) {
    const AdiabaticState s = state_from_index(p, i);
    const DoubletSolution d = doublet_solution(p, B, s.m);
    Vec v = Vec::Zero(p.dimension());
    if (!d.mixed) {
        if (s.m > 0) v(zeeman_index(p, 0.5, p.spin_host)) = 1.0;
        else v(zeeman_index(p, -0.5, -p.spin_host)) = 1.0;
        return v;
    }
    const int up = zeeman_index(p, 0.5, s.m - 0.5);
    const int dn = zeeman_index(p, -0.5, s.m + 0.5);
    if (s.sign > 0) {
        v(up) = d.a;
        v(dn) = d.b;
    } else {
        v(up) = -d.b;
        v(dn) = d.a;
    }
    return v;
}

double transition_frequency(const DonorParameters& p, double B, int u, int l) {
    if (u == l) throw std::invalid_argument("transition: u == l");
    return (level_energy(p, B, u) - level_energy(p, B, l)) / (2.0 * constants::pi);
}

double df_dB(const DonorParameters& p, double B, int u, int l) {
    if (u == l) throw std::invalid_argument("transition: u == l");
    const double dP = polarisation(p, B, u) - polarisation(p, B, l);
    const double dIz = expectation_iz(p, B, u) - expectation_iz(p, B, l);
    return (0.5 * p.gamma_e * dP + p.gamma_host * dIz) / (2.0 * constants::pi);
}

std::vector<double> find_owps(const DonorParameters& p, int u, int l, double b_lo, double b_hi,
                              const RootScan& scan) {
    if (u == l) throw std::invalid_argument("transition: u == l");
    return scan_roots([&](double B) { return polarisation(p, B, u) - polarisation(p, B, l); }, b_lo,
                      b_hi, scan.step);
}

std::optional<double> find_owp(const DonorParameters& p, int u, int l, double b_lo, double b_hi,
                               const RootScan& scan) {
    const auto roots = find_owps(p, u, l, b_lo, b_hi, scan);
    if (roots.empty()) return std::nullopt;
    return roots.front();
}

std::vector<double> find_clock_transitions(const DonorParameters& p, int u, int l, double b_lo,
                                           double b_hi, const RootScan& scan) {
    if (u == l) throw std::invalid_argument("transition: u == l");
    return scan_roots([&](double B) { return df_dB(p, B, u, l); }, b_lo, b_hi, scan.step);
}

double cancellation_resonance(const DonorParameters& p, double m) {
    const double I = p.spin_host;
    if (m < -(I - 0.5) - 1e-9 || m > 1e-9) throw std::invalid_argument("cancellation: m out of range");
    return -m * p.hyperfine_A / (p.gamma_e * (1.0 - p.delta()));
}

double transition_amplitude(const DonorParameters& p, double B, int u, int l) {
    if (u == l) throw std::invalid_argument("transition: u == l");
    const SpinOperatorSet S = build_spin_operators(0.5);
    const Mat sx = kron(S.sx, Mat::Identity(p.dimension() / 2, p.dimension() / 2));
    const Vec vu = analytic_eigenvector(p, B, u);
    const Vec vl = analytic_eigenvector(p, B, l);
    return std::abs(vu.dot(sx * vl));
}

double rabi_probability(double nu1, double nu, double nuB, double t, double t0) {
    if (!(nu1 > 0.0)) throw std::invalid_argument("rabi: nu1 must be positive");
    const double nur = std::sqrt(nu1 * nu1 + (nu - nuB) * (nu - nuB));
    const double s = std::sin(constants::pi * nur * (t - t0));
    return (nu1 / nur) * (nu1 / nur) * s * s;
}

std::vector<EsrLine> esr_resonances(const DonorParameters& p, double frequency_hz, double b_lo,
                                    double b_hi, const RootScan& scan) {
    std::vector<EsrLine> lines;
    const double I = p.spin_host;
    for (double m = -I + 0.5; m <= I + 0.5 + 1e-9; m += 1.0) {
        const int u = index_from_label(p, +1, m);
        const int l = index_from_label(p, -1, m - 1.0);
        const auto roots = scan_roots(
            [&](double B) { return transition_frequency(p, B, u, l) - frequency_hz; }, b_lo, b_hi, scan.step);
        for (double B : roots)
            if (B > b_lo) lines.push_back({u, l, B});
    }
    std::sort(lines.begin(), lines.end(), [](const EsrLine& a, const EsrLine& b) { return a.field > b.field; });
    return lines;
}

}  // namespace spinbath
