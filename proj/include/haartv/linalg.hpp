#pragma once

#include "haartv/matrix.hpp"
#include "haartv/rng.hpp"

namespace haartv {

// p x q matrix of iid standard normals drawn from the given stream. p >= q >= 1.
Matrix gaussian_block(int p, int q, RngStream& rng);

// X^T X as a symmetric q x q matrix.
SymmetricMatrix gram(const Matrix& x);

double frobenius_norm(const SymmetricMatrix& m);

// Eigenvalues by cyclic Jacobi sweeps, descending. Negative values above
// -1e-10 * ||m||_F are rounding debris of a PSD input and are clamped to 0.
// Throws std::runtime_error if 50 sweeps do not converge.
Spectrum symmetric_eigenvalues(const SymmetricMatrix& m);

// Haar-distributed n x n orthogonal matrix: QR of a Gaussian matrix with the
// column sign correction by the sign of the R diagonal.
Matrix haar_orthogonal(int n, RngStream& rng);

}  // namespace haartv
