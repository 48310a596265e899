#pragma once

// Linear response of a current J around e^{-beta H}: the dressed current,
// Kubo's canonical correlation and the regularized conductivity
//   sigma(omega) = beta int_0^inf e^{-eps s - i omega s} <(Delta(beta H) J) J(s)> ds,
// plus the split of J into conserved and energy-off-diagonal parts.

#include <string>
#include <vector>

#include "qanalysis/nonequilibrium.hpp"

namespace qa {

class ResponseSetup {
 public:
  // J is shifted by its thermal mean so that tr(J e^{-beta H}) = 0.
  ResponseSetup(Operator h, Operator j, double beta, double epsilon, Units units = {});

  const Operator& h() const { return h_; }
  const Operator& j() const { return j_; }
  double beta() const { return beta_; }
  double epsilon() const { return epsilon_; }
  const Units& units() const { return units_; }
  const Spectrum& spectrum() const { return spectrum_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  // Thermal mean removed from the J passed in.
  double j_mean() const { return j_mean_; }

  // Same H, J and beta with another eps.
  ResponseSetup with_epsilon(double epsilon) const;

  // <X> over e^{-beta H} / Z
  cplx average(const Operator& x) const;

  // Lehmann data in the eigenbasis: coefficient w_m K_mn |J_mn|^2 and line
  // frequency (E_n - E_m) / hbar, so that C(s) = sum c e^{i s w}.
  const Eigen::MatrixXd& line_weights() const { return line_weights_; }
  const Eigen::MatrixXd& line_frequencies() const { return line_freq_; }

 private:
  Operator h_, j_;
  double beta_, epsilon_;
  Units units_;
  Spectrum spectrum_;
  Eigen::VectorXd weights_;
  double j_mean_ = 0.0;
  Eigen::MatrixXd line_weights_, line_freq_;
};

struct ConductivityResult {
  enum class Method { resolvent, series, time_integral, large_omega };
  double omega = 0.0;
  cplx sigma{0.0, 0.0};
  Method method = Method::resolvent;
  int order = 0;               // N for the series
  double epsilon = 0.0;
  double error_estimate = 0.0;  // series: size of the last term; quadrature: rule gap
};

std::string method_name(ConductivityResult::Method m);

// Delta(beta H) J = (1/beta) int_0^beta e^{lH} J e^{-lH} dl
Operator dressed_current(const ResponseSetup& setup);

// <J : J(t)> = <(Delta(beta H) J) J(t)>, J(t) = e^{itH/hbar} J e^{-itH/hbar}
cplx canonical_correlation(const ResponseSetup& setup, double t);

// Resolvent form, evaluated over the Lehmann lines.
ConductivityResult conductivity(const ResponseSetup& setup, double omega);
std::vector<ConductivityResult> conductivity_scan(const ResponseSetup& setup,
                                                  const std::vector<double>& omegas);

struct TimeIntegralOptions {
  double decay = 32.0;  // integrate to s = decay / eps
  int order = 16;       // Gauss-Legendre points per panel
};

// Direct quadrature of the s-integral with the correlation from the spectrum.
ConductivityResult conductivity_time_integral(const ResponseSetup& setup, double omega,
                                              const TimeIntegralOptions& opt = {});

// (beta / i z) sum_{n<=N} <(Delta J) [(delta_H / hbar z)^n J]>.
// Regularized uses z = omega - i eps, which is the expansion of the resolvent;
// otherwise z = omega. Throws DivergenceWarning when the ratio of the
// geometric series, max line frequency / |z|, is >= 1.
ConductivityResult conductivity_series(const ResponseSetup& setup, double omega, int n_max,
                                       bool regularized = true);

// beta <(Delta J) J> / (i omega)
ConductivityResult large_omega(const ResponseSetup& setup, double omega);

struct ErgodicDecomposition {
  std::vector<double> a;            // <J H_j> / <H_j^2>
  std::vector<double> norms;        // <H_j^2>, after mean subtraction
  Operator j_prime;                 // energy-off-diagonal remainder
  Operator diagonal_remainder;      // energy-diagonal part left after the a_j fit
  double projection_norm = 0.0;     // ||diagonal_remainder||

  // beta sum a_j^2 <H_j^2>
  double drude_weight(double beta) const;
};

// Conserved quantities are shifted by their thermal mean like J. Throws
// NotConserved when ||[H_j, H]|| exceeds tol max(1, ||H_j|| ||H||) and
// NotOrthogonal when the normalized thermal Gram matrix is not the identity
// within tol.
ErgodicDecomposition ergodic_decomposition(const ResponseSetup& setup,
                                           const std::vector<Operator>& constants,
                                           double tol = 1e-8);

struct DivergenceScan {
  std::vector<double> eps;
  std::vector<double> sigma0;      // Re sigma(0; eps); the imaginary part vanishes
  double slope = 0.0;              // C in sigma(0; eps) ~ C / eps + D + E eps
  double finite_part = 0.0;        // D
  double linear_part = 0.0;        // E, the leading off-diagonal contribution
  double max_residual = 0.0;
};

// Least-squares fit of eps sigma(0; eps) = C + D eps + E eps^2 (E dropped with
// two points). eps sigma(0; eps) is non-decreasing in eps for Hermitian J;
// FitFailure if the data break that or eps_list is not positive descending.
DivergenceScan sigma0_divergence_scan(const ResponseSetup& setup, const std::vector<double>& eps_list);

// <J>_t = -<(Delta(beta H) eta_1(t)) J> with eta_1 built from Adot = J.
// The protocol must carry the setup's eps.
double linear_response_average(const ResponseSetup& setup, const ForceProtocol& protocol,
                               double t, const SeriesOptions& opt = {});

}  // namespace qa
