#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <vector>

// Exact detection probabilities by enumerating the joint Fock distribution
// P(n_idler, n_signal): geometric pair number with mean s, signal mode
// displaced by a coherent background of mean photon number B. The
// displacement matrix elements come from exp(beta (a^+ - a)) in a truncated
// Fock space, so nothing here relies on closed-form moments.
namespace oracle {

struct FockProbabilities {
  double p1 = 0, p2 = 0, p3 = 0, p12 = 0, p13 = 0, p23 = 0, p123 = 0;
  double g_si() const { return p12 / (p1 * p2); }
  double alpha() const { return p1 * p123 / (p12 * p13); }
  double g_ss() const { return p23 / (p2 * p3); }
};

struct FockSetup {
  double s = 0.0;
  double B = 0.0;
  double eps1 = 1.0, eps2 = 1.0, eps3 = 1.0;
  double T2 = 0.5;
  bool threshold = false;  ///< click detectors instead of photoelectron counts
  int n_max = 60;          ///< pair-number cutoff
  int dim = 100;           ///< Fock-space dimension for the displacement
};

inline Eigen::MatrixXd displacement(double beta, int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXd gen = beta * (a.transpose() - a);
  return gen.exp();
}

inline FockProbabilities fock_probabilities(const FockSetup& f) {
  const Eigen::MatrixXd D = displacement(std::sqrt(f.B), f.dim);
  const double T = f.T2, R = 1.0 - f.T2;
  const double e2 = T * f.eps2, e3 = R * f.eps3;
  FockProbabilities p;
  const double q = f.s / (1.0 + f.s);
  double pn = 1.0 / (1.0 + f.s);
  for (int n = 0; n <= f.n_max; ++n, pn *= q) {
    // Idler response given n.
    const double i1 = f.threshold ? 1.0 - std::pow(1.0 - f.eps1, n) : f.eps1 * n;
    for (int k = 0; k < f.dim - 10; ++k) {
      const double pk = pn * D(k, n) * D(k, n);
      if (pk == 0.0) continue;
      double s2, s3, s23;
      if (f.threshold) {
        s2 = 1.0 - std::pow(1.0 - e2, k);
        s3 = 1.0 - std::pow(1.0 - e3, k);
        s23 = 1.0 - std::pow(1.0 - e2, k) - std::pow(1.0 - e3, k) + std::pow(1.0 - e2 - e3, k);
      } else {
        s2 = e2 * k;
        s3 = e3 * k;
        s23 = e2 * e3 * k * (k - 1.0);
      }
      p.p1 += pk * i1;
      p.p2 += pk * s2;
      p.p3 += pk * s3;
      p.p12 += pk * i1 * s2;
      p.p13 += pk * i1 * s3;
      p.p23 += pk * s23;
      p.p123 += pk * i1 * s23;
    }
  }
  return p;
}

}  // namespace oracle
