#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace bdsfix {

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations, in
// ascending order. Only the upper triangle is read. Iterates until every
// off-diagonal entry satisfies |a_pq| <= tol * sqrt(|a_pp a_qq|), which keeps
// small eigenvalues accurate relative to their own size.
template <int N>
Eigen::Matrix<double, N, 1> jacobi_eigenvalues(const Eigen::Matrix<double, N, N>& input,
                                               double tol = 1e-12, int max_sweeps = 50) {
  Eigen::Matrix<double, N, N> a = input.template selfadjointView<Eigen::Upper>();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0 || std::abs(apq) <= tol * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          continue;
        }
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int r = 0; r < N; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
      }
    }
    if (!rotated) break;
  }

  Eigen::Matrix<double, N, 1> w = a.diagonal();
  std::sort(w.data(), w.data() + N);
  return w;
}

}  // namespace bdsfix
