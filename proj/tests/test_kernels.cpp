#include "doctest.h"
#include "qmem/eit.hpp"
#include "qmem/kernels.hpp"

using namespace qmem;

TEST_CASE("serial and parallel kernels agree") {
  set_thread_count(4);
  CHECK(thread_count() == 4);
  const auto g = FrequencyGrid::from_time_window(128, -0.6e-6, 1.6e-6);
  const ComplexVector om = ControlProfile::step_off_on(1e8, 0.0, 500e-9, 30e-9, 1).sample_time(g);
  const ComplexVector kern = pole_response(g, 1e4, 1e3);
  const ComplexMatrix as = assemble_coupling_time(om, kern, 0.3, ExecutionPolicy::Serial);
  const ComplexMatrix ap = assemble_coupling_time(om, kern, 0.3, ExecutionPolicy::Parallel);
  CHECK(as == ap);
  const ComplexMatrix fs = to_frequency_operator(as, g, ExecutionPolicy::Serial);
  const ComplexMatrix fp = to_frequency_operator(as, g, ExecutionPolicy::Parallel);
  CHECK(fs == fp);
  const ComplexVector x = ComplexVector::Random(128);
  CHECK((matvec(fs, x, ExecutionPolicy::Serial) - matvec(fs, x, ExecutionPolicy::Parallel)).norm() <
        1e-12 * (fs * x).norm());
  CHECK((matvec(fs, x, ExecutionPolicy::Serial) - fs * x).norm() < 1e-12 * (fs * x).norm());
  set_thread_count(0);
}

TEST_CASE("frequency operator equals the explicit transform product") {
  const auto g = FrequencyGrid::from_time_window(32, -0.1e-6, 0.4e-6);
  const ComplexMatrix a = ComplexMatrix::Random(32, 32);
  ComplexMatrix F(32, 32);
  for (int k = 0; k < 32; ++k) {
    for (int n = 0; n < 32; ++n) F(k, n) = std::polar(1.0 / std::sqrt(32.0), g.detuning(k) * g.time(n));
  }
  const ComplexMatrix ref = F * a * F.adjoint();
  CHECK((to_frequency_operator(a, g, ExecutionPolicy::Serial) - ref).norm() < 1e-12 * ref.norm());
}

TEST_CASE("circulant coupling is diagonal in frequency") {
  const auto g = FrequencyGrid::from_time_window(64, -0.3e-6, 1.0e-6);
  const ComplexVector om = ComplexVector::Constant(64, 2.0);
  const ComplexVector kern = pole_response(g, 0.0, 1e5);
  const ComplexMatrix L = to_frequency_operator(assemble_coupling_time(om, kern, 1.0, ExecutionPolicy::Serial), g,
                                                ExecutionPolicy::Serial);
  for (int k = 0; k < 64; ++k) {
    const cplx expect = 4.0 / (g.detuning(static_cast<std::size_t>(k)) + cplx(0.0, 1e5));
    CHECK(std::abs(L(k, k) - expect) < 1e-9 * std::abs(expect));
  }
  CHECK((L - ComplexMatrix(L.diagonal().asDiagonal())).norm() < 1e-12 * L.norm());
}
