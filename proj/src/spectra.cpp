#include "spinbath/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace spinbath {

namespace {

constexpr double two_pi = 6.283185307179586476925;

void check_field(double B) {
    if (!(B >= 0.0)) throw std::invalid_argument("endor: field must be non-negative");
}

}  // namespace

double endor_resonance_iso(double gamma_n, double B, double a_iso, double P) {
    check_field(B);
    return std::abs(gamma_n * B + 0.5 * a_iso * P) / two_pi;
}

double endor_resonance_aniso(double gamma_n, double B, double a_iso, double T, double theta, double P) {
    check_field(B);
    const double c = std::cos(theta), s = std::sin(theta);
    const double alpha = (a_iso + 2.0 * T) * c * c + (a_iso - T) * s * s;
    const double beta = 3.0 * T * s * c;
    return std::hypot(gamma_n * B + 0.5 * alpha * P, 0.5 * beta * P) / two_pi;
}

double endor_resonance_numeric(double gamma_n, double B, double a_iso, double T, double theta, double P) {
    check_field(B);
    const Eigen::Vector3d n(std::sin(theta), 0.0, std::cos(theta));
    const Eigen::Matrix3d A = a_iso * Eigen::Matrix3d::Identity() + T * (3.0 * n * n.transpose() - Eigen::Matrix3d::Identity());
    // Electron frozen along z with <Sz> = P/2: H = gamma_n B Iz + (P/2)(A_zz Iz + A_zx Ix).
    const double hz = gamma_n * B + 0.5 * P * A(2, 2);
    const double hx = 0.5 * P * A(2, 0);
    Eigen::Matrix2d h;
    h << 0.5 * hz, 0.5 * hx, 0.5 * hx, -0.5 * hz;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    return (es.eigenvalues()(1) - es.eigenvalues()(0)) / two_pi;
}

std::vector<double> synthesize_spectrum(const std::vector<EndorCoupling>& couplings, double gamma_n, double B,
                                        double p_u, double p_l, const std::vector<double>& grid_hz, double fwhm_hz) {
    if (!(fwhm_hz > 0.0)) throw std::invalid_argument("synthesize_spectrum: fwhm must be positive");
    if (!std::is_sorted(grid_hz.begin(), grid_hz.end())) throw std::invalid_argument("synthesize_spectrum: grid not sorted");
    const double sigma = fwhm_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double norm = 1.0 / (sigma * std::sqrt(two_pi));
    std::vector<double> out(grid_hz.size(), 0.0);
    for (const auto& c : couplings) {
        for (double P : {p_u, p_l}) {
            const double f0 = endor_resonance_aniso(gamma_n, B, c.a_iso, c.t_aniso, c.theta, P);
            for (size_t i = 0; i < grid_hz.size(); ++i) {
                const double x = (grid_hz[i] - f0) / sigma;
                out[i] += c.amplitude * norm * std::exp(-0.5 * x * x);
            }
        }
    }
    return out;
}

void write_spectrum_csv(const std::vector<double>& grid_hz, const std::vector<double>& intensity,
                        const std::string& path) {
    if (grid_hz.size() != intensity.size()) throw std::invalid_argument("write_spectrum_csv: size mismatch");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    f << "frequency_MHz,intensity\n";
    for (size_t i = 0; i < grid_hz.size(); ++i) f << grid_hz[i] * 1e-6 << ',' << intensity[i] << '\n';
}

std::vector<double> moving_average(const std::vector<double>& y, int window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("moving_average: window must be odd and positive");
    const int h = window / 2;
    const int n = static_cast<int>(y.size());
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - h), hi = std::min(n - 1, i + h);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) s += y[j];
        out[i] = s / (hi - lo + 1);
    }
    return out;
}

double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level) {
    if (t.size() != y.size()) throw std::invalid_argument("first_crossing: size mismatch");
    for (size_t i = 1; i < y.size(); ++i) {
        if (y[i - 1] >= level && y[i] < level) {
            const double f = (y[i - 1] - level) / (y[i - 1] - y[i]);
            return t[i - 1] + f * (t[i] - t[i - 1]);
        }
    }
    return std::numeric_limits<double>::infinity();
}

double stretched_model(double t, double t2, double n, double t2_prime) {
    const double lin = std::isfinite(t2_prime) ? t / t2_prime : 0.0;
    return std::exp(-lin - std::pow(t / t2, n));
}

namespace {

struct Objective {
    const std::vector<double>& t;
    const std::vector<double>& y;

    // p = (log T2, n, rate / scale)
    double operator()(const std::array<double, 3>& p, double scale) const {
        const double t2 = std::exp(p[0]);
        const double rate = p[2] * scale;
        double s = 0.0;
        for (size_t i = 0; i < t.size(); ++i) {
            const double m = std::exp(-rate * t[i] - std::pow(t[i] / t2, p[1]));
            const double d = m - y[i];
            s += d * d;
        }
        return s;
    }
};

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, const FitOptions& opt) {
    if (t.size() != y.size()) throw std::invalid_argument("fit_decay: size mismatch");
    if (t.size() < 8) throw std::invalid_argument("fit_decay: need at least 8 samples");
    if (!std::is_sorted(t.begin(), t.end()) || t.front() < 0.0) throw std::invalid_argument("fit_decay: bad time grid");
    if (!(opt.n_min > 0.0) || !(opt.n_max > opt.n_min)) throw std::invalid_argument("fit_decay: bad exponent bounds");

    DecayFit fit;
    const std::vector<double> smooth = moving_average(y, opt.smoothing_window);
    fit.t_1e = first_crossing(t, smooth, std::exp(-1.0));
    if (!std::isfinite(fit.t_1e)) {
        fit.method = "no-decay";
        return fit;
    }
    fit.decays = true;

    const Objective obj{t, y};
    const double scale = 1.0 / fit.t_1e;
    const double n_lo = opt.n_min + 1e-6;
    std::array<double, 3> best{std::log(fit.t_1e), 2.0, 0.0};
    double best_v = obj(best, scale);
    const int n_t2 = 61, n_n = 36;
    std::vector<double> rates{0.0};
    if (opt.free_t2_prime)
        for (int k = 0; k < 12; ++k) rates.push_back(1e-3 * std::pow(10.0, k * 3.5 / 11.0));
    for (int a = 0; a < n_t2; ++a) {
        const double lt = std::log(fit.t_1e) + std::log(20.0) * (2.0 * a / (n_t2 - 1) - 1.0);
        for (int b = 0; b < n_n; ++b) {
            const double n = n_lo + (opt.n_max - n_lo) * b / (n_n - 1);
            for (double r : rates) {
                const std::array<double, 3> p{lt, n, r};
                const double v = obj(p, scale);
                if (v < best_v) {
                    best_v = v;
                    best = p;
                }
            }
        }
    }

    std::array<double, 3> step{0.05, 0.05, opt.free_t2_prime ? 0.05 : 0.0};
    const int dims = opt.free_t2_prime ? 3 : 2;
    for (int iter = 0; iter < 20000 && (step[0] > 1e-12 || step[1] > 1e-12); ++iter) {
        bool improved = false;
        for (int d = 0; d < dims; ++d) {
            for (double sgn : {1.0, -1.0}) {
                std::array<double, 3> p = best;
                p[d] += sgn * step[d];
                p[1] = std::clamp(p[1], n_lo, opt.n_max);
                p[2] = std::max(0.0, p[2]);
                const double v = obj(p, scale);
                if (v < best_v) {
                    best_v = v;
                    best = p;
                    improved = true;
                }
            }
        }
        if (!improved)
            for (auto& s : step) s *= 0.5;
    }

    fit.t2 = std::exp(best[0]);
    fit.n = best[1];
    fit.t2_prime = best[2] > 0.0 ? 1.0 / (best[2] * scale) : std::numeric_limits<double>::infinity();
    const double m = static_cast<double>(t.size());
    fit.residual = std::sqrt(best_v / m);
    fit.method = opt.free_t2_prime ? "stretched+exponential" : "stretched";

    // Covariance of (T2, n) from the Jacobian at the optimum.
    Eigen::MatrixXd J(t.size(), 2);
    for (size_t i = 0; i < t.size(); ++i) {
        const double lin = std::isfinite(fit.t2_prime) ? t[i] / fit.t2_prime : 0.0;
        const double x = t[i] / fit.t2;
        const double xn = x > 0.0 ? std::pow(x, fit.n) : 0.0;
        const double mod = std::exp(-lin - xn);
        J(i, 0) = mod * xn * fit.n / fit.t2;
        J(i, 1) = x > 0.0 ? -mod * xn * std::log(x) : 0.0;
    }
    const double dof = std::max(1.0, m - dims);
    const Eigen::Matrix2d jtj = J.transpose() * J;
    if (std::abs(jtj.determinant()) > 0.0) {
        const Eigen::Matrix2d cov = jtj.inverse() * (best_v / dof);
        fit.t2_err = std::sqrt(std::max(0.0, cov(0, 0)));
        fit.n_err = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    return fit;
}

}  // namespace spinbath
