#include "haartv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace haartv {

Matrix gaussian_block(int p, int q, RngStream& rng) {
    if (q < 1 || p < q) throw std::invalid_argument("gaussian_block: need p >= q >= 1");
    Matrix x(p, q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) x(i, j) = rng.next_gaussian();
    return x;
}

SymmetricMatrix gram(const Matrix& x) {
    const int p = x.rows();
    const int q = x.cols();
    SymmetricMatrix w(q);
    for (int a = 0; a < q; ++a) {
        for (int b = 0; b <= a; ++b) {
            double s = 0.0;
            for (int i = 0; i < p; ++i) s += x(i, a) * x(i, b);
            w.at(a, b) = s;
        }
    }
    return w;
}

double frobenius_norm(const SymmetricMatrix& m) {
    const int n = m.order();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        s += m.at(i, i) * m.at(i, i);
        for (int j = 0; j < i; ++j) s += 2.0 * m.at(i, j) * m.at(i, j);
    }
    return std::sqrt(s);
}

Spectrum symmetric_eigenvalues(const SymmetricMatrix& m) {
    const int n = m.order();
    const double frob = frobenius_norm(m);

    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = m.at(i, j);
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    const double stop = 1e-13 * frob;
    constexpr int kMaxSweeps = 50;

    if (frob > 0.0 && n > 1) {
        bool converged = false;
        for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
            double off_max = 0.0;
            for (int p = 0; p < n - 1; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const double apq = at(p, q);
                    off_max = std::max(off_max, std::fabs(apq));
                    if (std::fabs(apq) <= stop) continue;
                    const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                     (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    const double tau = s / (1.0 + c);
                    const double app = at(p, p);
                    const double aqq = at(q, q);
                    at(p, p) = app - t * apq;
                    at(q, q) = aqq + t * apq;
                    at(p, q) = 0.0;
                    at(q, p) = 0.0;
                    for (int r = 0; r < n; ++r) {
                        if (r == p || r == q) continue;
                        const double arp = at(r, p);
                        const double arq = at(r, q);
                        at(r, p) = at(p, r) = arp - s * (arq + tau * arp);
                        at(r, q) = at(q, r) = arq + s * (arp - tau * arq);
                    }
                }
            }
            if (off_max <= stop) converged = true;
        }
        if (!converged) {
            // Final check: the last sweep may have finished the job.
            double off_max = 0.0;
            for (int p = 0; p < n - 1; ++p)
                for (int q = p + 1; q < n; ++q) off_max = std::max(off_max, std::fabs(at(p, q)));
            if (off_max > stop)
                throw std::runtime_error("symmetric_eigenvalues: Jacobi did not converge in 50 sweeps");
        }
    }

    Spectrum spec;
    spec.values.resize(n);
    for (int i = 0; i < n; ++i) spec.values[i] = at(i, i);
    std::sort(spec.values.begin(), spec.values.end(), std::greater<double>());

    const double clamp_tol = 1e-10 * frob;
    for (double& v : spec.values)
        if (v < 0.0 && v >= -clamp_tol) v = 0.0;
    return spec;
}

Matrix haar_orthogonal(int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("haar_orthogonal: n must be positive");

    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.next_gaussian();

    // Householder factorization; reflectors stored below the diagonal.
    std::vector<double> beta(n, 0.0);
    std::vector<double> diag(n, 0.0);
    std::vector<double> work(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double norm2 = 0.0;
        for (int i = k; i < n; ++i) norm2 += a(i, k) * a(i, k);
        const double norm = std::sqrt(norm2);
        const double akk = a(k, k);
        if (norm == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        const double alpha = (akk >= 0.0 ? -norm : norm);
        diag[k] = alpha;  // R(k,k)
        // v = x - alpha e1, normalized so v[k] = 1.
        const double vkk = akk - alpha;
        for (int i = k + 1; i < n; ++i) a(i, k) /= vkk;
        beta[k] = -vkk / alpha;  // = 2 / (v^T v) with v[k] = 1
        for (int j = k + 1; j < n; ++j) {
            double s = a(k, j);
            for (int i = k + 1; i < n; ++i) s += a(i, k) * a(i, j);
            s *= beta[k];
            a(k, j) -= s;
            for (int i = k + 1; i < n; ++i) a(i, j) -= s * a(i, k);
        }
    }

    // Backward accumulation of Q into an identity.
    Matrix q(n, n);
    for (int i = 0; i < n; ++i) q(i, i) = 1.0;
    for (int k = n - 1; k >= 0; --k) {
        if (beta[k] == 0.0) continue;
        for (int j = k; j < n; ++j) {
            double s = q(k, j);
            for (int i = k + 1; i < n; ++i) s += a(i, k) * q(i, j);
            s *= beta[k];
            q(k, j) -= s;
            for (int i = k + 1; i < n; ++i) q(i, j) -= s * a(i, k);
        }
    }

    // Multiply column j of Q by sign(R_jj) so the law is exactly Haar.
    for (int j = 0; j < n; ++j) {
        if (diag[j] < 0.0) {
            for (int i = 0; i < n; ++i) q(i, j) = -q(i, j);
        }
    }
    return q;
}

}  // namespace haartv
