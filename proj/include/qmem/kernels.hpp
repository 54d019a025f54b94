#pragma once

#include "qmem/grid.hpp"

namespace qmem {

/// Selects the serial reference or the OpenMP implementation of a kernel.
/// Both produce identical results up to floating-point summation order
/// (mat-vec) or bitwise (everything else).
enum class ExecutionPolicy { Serial, Parallel };

/// Sets the OpenMP thread count used by ExecutionPolicy::Parallel; n <= 0
/// restores the runtime default.
void set_thread_count(int n);
int thread_count();

/// Time-domain coupling operator A(n, n') = c2 * omega(n) * g((n - n') mod N) * conj(omega(n')).
ComplexMatrix assemble_coupling_time(const ComplexVector& omega_t, const ComplexVector& g, double c2,
                                     ExecutionPolicy policy);

/// F A F^dagger with the grid's unitary transform: maps an operator acting on
/// time samples to the same operator acting on detuning samples.
ComplexMatrix to_frequency_operator(const ComplexMatrix& a_time, const FrequencyGrid& grid,
                                    ExecutionPolicy policy);

/// y = A x.
ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x, ExecutionPolicy policy);

}  // namespace qmem
