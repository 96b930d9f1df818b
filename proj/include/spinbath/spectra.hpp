#pragma once

#include <limits>
#include <string>
#include <vector>

namespace spinbath {

struct EndorCoupling {
    double a_iso = 0.0;     // rad s^-1
    double t_aniso = 0.0;   // rad s^-1
    double theta = 0.0;     // rad, field angle to the coupling axis
    double amplitude = 1.0; // peak area
};

inline constexpr double default_endor_fwhm = 0.12e6;  // Hz

// (1/2pi)|gamma_n B + a P / 2|
double endor_resonance_iso(double gamma_n, double B, double a_iso, double P);
// (1/2pi) sqrt((gamma_n B + alpha P/2)^2 + (beta P/2)^2),
// alpha = a + T(3cos^2 - 1), beta = 3T sin cos.
double endor_resonance_aniso(double gamma_n, double B, double a_iso, double T, double theta, double P);
// Nuclear splitting from diagonalizing the 2x2 block of one electronic level.
double endor_resonance_numeric(double gamma_n, double B, double a_iso, double T, double theta, double P);

// Equal-width Gaussians (area = amplitude) at the upper and lower level lines of each coupling.
std::vector<double> synthesize_spectrum(const std::vector<EndorCoupling>& couplings, double gamma_n, double B,
                                        double p_u, double p_l, const std::vector<double>& grid_hz,
                                        double fwhm_hz = default_endor_fwhm);

void write_spectrum_csv(const std::vector<double>& grid_hz, const std::vector<double>& intensity,
                        const std::string& path);

struct DecayFit {
    double t2 = std::numeric_limits<double>::infinity();        // s
    double t2_prime = std::numeric_limits<double>::infinity();  // s
    double n = 2.0;
    double residual = 0.0;  // rms
    double t2_err = 0.0, n_err = 0.0;
    double t_1e = std::numeric_limits<double>::infinity();  // first 1/e crossing, s
    bool decays = false;
    std::string method;
};

struct FitOptions {
    int smoothing_window = 1;  // moving average width (odd) before the 1/e search
    double n_min = 0.5, n_max = 4.0;
    bool free_t2_prime = true;
};

std::vector<double> moving_average(const std::vector<double>& y, int window);
// First downward crossing of 1/e with linear interpolation; +inf when none.
double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level);
double stretched_model(double t, double t2, double n, double t2_prime);

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, const FitOptions& opt = {});

}  // namespace spinbath
