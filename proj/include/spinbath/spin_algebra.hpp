#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace spinbath {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct SpinOperatorSet {
    double total_spin = 0.0;
    int dimension = 1;
    Mat sx, sy, sz, s_plus, s_minus;
};

struct ProductSpace {
    std::vector<int> factor_dimensions;

    int total_dimension() const;
    int size() const { return static_cast<int>(factor_dimensions.size()); }
};

struct HermitianEigensystem {
    Eigen::VectorXd eigenvalues;  // ascending
    Mat eigenvectors;              // column k <-> eigenvalue k
};

// sz is diagonal with entries S, S-1, ..., -S.
SpinOperatorSet build_spin_operators(double total_spin);

Mat kron(const Mat& a, const Mat& b);

Mat embed(const Mat& op, int slot, const ProductSpace& space);

HermitianEigensystem eigendecompose(const Mat& h);

// exp(-i H t) from a precomputed eigensystem.
Mat evolve(const HermitianEigensystem& eig, double t);

// <u| Tr_B rho |l> with the central system in slot 0.
cplx partial_trace_offdiagonal(const Mat& rho, const ProductSpace& space, int u, int l);

double max_abs(const Mat& m);

}  // namespace spinbath
