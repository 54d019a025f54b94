#include "qmem/kernels.hpp"

#include <omp.h>

#include "qmem/errors.hpp"

namespace qmem {

void set_thread_count(int n) {
  if (n > 0) {
    omp_set_num_threads(n);
  } else {
    omp_set_num_threads(omp_get_num_procs());
  }
}

int thread_count() { return omp_get_max_threads(); }

ComplexMatrix assemble_coupling_time(const ComplexVector& omega_t, const ComplexVector& g, double c2,
                                     ExecutionPolicy policy) {
  const Eigen::Index n = omega_t.size();
  if (g.size() != n) throw ValidationError("coupling: size mismatch");
  ComplexMatrix a(n, n);
  auto column = [&](Eigen::Index j) {
    const cplx right = c2 * std::conj(omega_t[j]);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index d = i - j;
      if (d < 0) d += n;
      a(i, j) = omega_t[i] * g[d] * right;
    }
  };
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < n; ++j) column(j);
  } else {
    for (Eigen::Index j = 0; j < n; ++j) column(j);
  }
  return a;
}

namespace {

// Replaces each column of m by its unitary forward transform.
void transform_columns(ComplexMatrix& m, const FrequencyGrid& grid, ExecutionPolicy policy) {
  const Eigen::Index n = m.cols();
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel
    {
      SpectralTransform tr(grid);
#pragma omp for schedule(static)
      for (Eigen::Index j = 0; j < n; ++j) m.col(j) = tr.unitary_forward(m.col(j));
    }
  } else {
    SpectralTransform tr(grid);
    for (Eigen::Index j = 0; j < n; ++j) m.col(j) = tr.unitary_forward(m.col(j));
  }
}

}  // namespace

ComplexMatrix to_frequency_operator(const ComplexMatrix& a_time, const FrequencyGrid& grid,
                                    ExecutionPolicy policy) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (a_time.rows() != n || a_time.cols() != n) throw ValidationError("operator transform: size mismatch");
  // F A F^+ = (F (F A)^+)^+
  ComplexMatrix b = a_time;
  transform_columns(b, grid, policy);
  ComplexMatrix c = b.adjoint();
  transform_columns(c, grid, policy);
  return c.adjoint();
}

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x, ExecutionPolicy policy) {
  if (a.cols() != x.size()) throw ValidationError("matvec: size mismatch");
  if (policy == ExecutionPolicy::Serial) return a * x;
  const Eigen::Index rows = a.rows();
  ComplexVector y(rows);
#pragma omp parallel
  {
    const int nt = omp_get_num_threads();
    const int id = omp_get_thread_num();
    const Eigen::Index chunk = (rows + nt - 1) / nt;
    const Eigen::Index lo = std::min<Eigen::Index>(rows, id * chunk);
    const Eigen::Index hi = std::min<Eigen::Index>(rows, lo + chunk);
    if (hi > lo) y.segment(lo, hi - lo).noalias() = a.middleRows(lo, hi - lo) * x;
  }
  return y;
}

}  // namespace qmem
