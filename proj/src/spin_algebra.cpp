#include "spinbath/spin_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace spinbath {

int ProductSpace::total_dimension() const {
    int d = 1;
    for (int f : factor_dimensions) d *= f;
    return d;
}

SpinOperatorSet build_spin_operators(double total_spin) {
    const double twice = 2.0 * total_spin;
    if (total_spin < 0.0 || std::abs(twice - std::round(twice)) > 1e-12)
        throw std::invalid_argument("spin must be a non-negative half-integer");

    SpinOperatorSet ops;
    ops.total_spin = total_spin;
    ops.dimension = static_cast<int>(std::lround(twice)) + 1;
    const int d = ops.dimension;
    ops.sz = Mat::Zero(d, d);
    ops.s_plus = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = total_spin - k;
        ops.sz(k, k) = m;
        if (k > 0) ops.s_plus(k - 1, k) = std::sqrt(total_spin * (total_spin + 1.0) - m * (m + 1.0));
    }
    ops.s_minus = ops.s_plus.adjoint();
    ops.sx = 0.5 * (ops.s_plus + ops.s_minus);
    ops.sy = cplx(0.0, -0.5) * (ops.s_plus - ops.s_minus);
    return ops;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat embed(const Mat& op, int slot, const ProductSpace& space) {
    if (slot < 0 || slot >= space.size()) throw std::invalid_argument("embed: slot out of range");
    if (op.rows() != space.factor_dimensions[slot] || op.cols() != op.rows())
        throw std::invalid_argument("embed: operator dimension does not match slot");
    int left = 1, right = 1;
    for (int s = 0; s < slot; ++s) left *= space.factor_dimensions[s];
    for (int s = slot + 1; s < space.size(); ++s) right *= space.factor_dimensions[s];
    const int d = op.rows();
    const int total = left * d * right;
    Mat out = Mat::Zero(total, total);
    for (int a = 0; a < left; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const cplx v = op(i, j);
                if (v == cplx(0.0, 0.0)) continue;
                const int row0 = (a * d + i) * right;
                const int col0 = (a * d + j) * right;
                for (int b = 0; b < right; ++b) out(row0 + b, col0 + b) = v;
            }
    return out;
}

double max_abs(const Mat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianEigensystem eigendecompose(const Mat& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eigendecompose: matrix not square");
    const double scale = max_abs(h);
    if (max_abs(h - h.adjoint()) > 1e-9 * std::max(scale, 1e-300))
        throw std::invalid_argument("eigendecompose: matrix not Hermitian");

    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");
    HermitianEigensystem eig;
    eig.eigenvalues = solver.eigenvalues();
    eig.eigenvectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < eig.eigenvectors.cols(); ++k) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index r = 0; r < eig.eigenvectors.rows(); ++r) {
            const double a = std::abs(eig.eigenvectors(r, k));
            if (a > best_abs * (1.0 + 1e-9)) {
                best_abs = a;
                best = r;
            }
        }
        const cplx pivot = eig.eigenvectors(best, k);
        eig.eigenvectors.col(k) *= std::conj(pivot) / std::abs(pivot);
    }
    return eig;
}

Mat evolve(const HermitianEigensystem& eig, double t) {
    const Eigen::Index d = eig.eigenvalues.size();
    Vec phases(d);
    for (Eigen::Index k = 0; k < d; ++k) phases(k) = std::polar(1.0, -eig.eigenvalues(k) * t);
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

cplx partial_trace_offdiagonal(const Mat& rho, const ProductSpace& space, int u, int l) {
    if (space.size() == 0) throw std::invalid_argument("partial trace: empty space");
    const int dc = space.factor_dimensions[0];
    if (u < 0 || l < 0 || u >= dc || l >= dc || u == l)
        throw std::invalid_argument("partial trace: invalid central indices");
    if (rho.rows() != space.total_dimension() || rho.cols() != rho.rows())
        throw std::invalid_argument("partial trace: state dimension mismatch");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-9)
        throw std::invalid_argument("partial trace: state not normalized");
    const int db = space.total_dimension() / dc;
    cplx acc = 0.0;
    for (int b = 0; b < db; ++b) acc += rho(u * db + b, l * db + b);
    return acc;
}

}  // namespace spinbath
