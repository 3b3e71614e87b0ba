#include "vibrofdd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vibrofdd/errors.hpp"

namespace vibrofdd {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    const std::size_t n = a.rows();
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    }
    return std::sqrt(s);
}

}  // namespace

SymmetricEigen symmetric_eigen(Matrix a, double off_diagonal_tol) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n) throw ShapeMismatch("symmetric_eigen: matrix must be square and non-empty");

    double frob = 0.0;
    for (double v : a.data()) frob += v * v;
    frob = std::sqrt(frob);
    const double scale = frob > 0.0 ? frob : 1.0;
    for (double& v : a.data()) v /= scale;

    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double off = off_diagonal_norm(a);
    double prev_off = std::numeric_limits<double>::infinity();
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off >= off_diagonal_tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // A <- J^T A J with J the (p,q) rotation
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        off = off_diagonal_norm(a);
        if (off >= prev_off) break;  // rounding floor reached
        prev_off = off;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t lhs, std::size_t rhs) { return diag[lhs] > diag[rhs]; });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = diag[order[i]] * scale;
        for (std::size_t k = 0; k < n; ++k) out.vectors(i, k) = v(k, order[i]);
    }
    return out;
}

}  // namespace vibrofdd
