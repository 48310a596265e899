#include "qanalysis/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qa {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

double split_threshold(const Spectrum& s) {
  const double scale = std::max(std::abs(s.min()), std::abs(s.max()));
  return Tolerances{}.degeneracy_rel * std::max(1.0, scale);
}

void check_domain(const Spectrum& s, const ScalarFunction& f, const std::string& what) {
  if (!f.admits(s.min())) {
    std::ostringstream msg;
    msg << what << ": eigenvalue " << s.min() << " outside the domain of " << f.name();
    throw DomainViolation(msg.str());
  }
}

void check_chain_cost(int d, int n) {
  // d^{n+1} chains; refuse anything beyond ~1e8.
  if ((n + 1) * std::log10(std::max(d, 1)) > 8.0) {
    std::ostringstream msg;
    msg << "chain sum with d = " << d << ", order " << n << " is too large";
    throw DimensionCap(msg.str());
  }
}

// Visits every index chain i0..in with weight B_{i0 i1} ... B_{i_{n-1} in}.
template <class Visit>
void for_each_chain(const Operator& bt, int n, Visit&& visit) {
  const int d = static_cast<int>(bt.rows());
  std::vector<int> idx(n + 1, 0);
  auto rec = [&](auto& self, int depth, cplx weight) -> void {
    if (depth == n) {
      visit(idx, weight);
      return;
    }
    const int from = idx[depth];
    for (int j = 0; j < d; ++j) {
      const cplx w = weight * bt(from, j);
      if (w == 0.0) continue;
      idx[depth + 1] = j;
      self(self, depth + 1, w);
    }
  };
  for (int i0 = 0; i0 < d; ++i0) {
    idx[0] = i0;
    rec(rec, 0, 1.0);
  }
}

// Eigenbasis matrix of sum over chains of f[l_i0..l_in] prod B, without n!.
Operator divided_difference_chains(const ScalarFunction& f, const Spectrum& s,
                                   const Operator& bt, int n) {
  const int d = s.dim();
  check_chain_cost(d, n);
  const double thr = split_threshold(s);
  Operator out = Operator::Zero(d, d);
  std::vector<double> nodes(n + 1);
  for_each_chain(bt, n, [&](const std::vector<int>& idx, cplx w) {
    for (int k = 0; k <= n; ++k) nodes[k] = s.eigenvalues(idx[k]);
    out(idx[0], idx[n]) += divided_difference(f, nodes, thr) * w;
  });
  return out;
}

// h_0..h_kmax of z, all at once.
std::vector<double> complete_homogeneous_all(std::span<const double> z, int k_max) {
  std::vector<double> h(k_max + 1, 0.0);
  h[0] = 1.0;
  if (z.empty()) return h;
  for (int k = 1; k <= k_max; ++k) h[k] = h[k - 1] * z[0];
  for (std::size_t j = 1; j < z.size(); ++j) {
    for (int k = 1; k <= k_max; ++k) h[k] += z[j] * h[k - 1];
  }
  return h;
}

}  // namespace

cplx divided_difference(const ScalarFunction& f, std::span<const double> nodes, double threshold) {
  if (nodes.empty()) throw DomainViolation("divided_difference needs at least one node");
  std::vector<double> x(nodes.begin(), nodes.end());
  std::sort(x.begin(), x.end());
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<cplx> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = f(x[i]);
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i + k <= n; ++i) {
      const int j = i + k;
      const double gap = x[j] - x[i];
      if (gap < threshold) {
        double mean = 0.0;
        for (int q = i; q <= j; ++q) mean += x[q];
        mean /= (k + 1);
        t[i] = f.derivative(k, mean) / factorial(k);
      } else {
        t[i] = (t[i + 1] - t[i]) / gap;
      }
    }
  }
  return t[0];
}

double complete_homogeneous(std::span<const double> z, int k) {
  if (k < 0) return 0.0;
  return complete_homogeneous_all(z, k)[k];
}

Operator higher_derivative_apply(const HigherDerivativeRequest& req) {
  if (req.order < 1) throw DomainViolation("derivative order must be >= 1");
  if (req.order > req.max_order) {
    std::ostringstream msg;
    msg << "derivative order " << req.order << " exceeds the cap " << req.max_order;
    throw DimensionCap(msg.str());
  }
  check_square(req.b, "higher_derivative_apply direction");
  if (req.b.rows() != req.a.rows()) throw DimensionMismatch("A and B dimensions differ");
  const Spectrum s = spectral_decompose(req.a);
  check_domain(s, req.f, "higher_derivative_apply");
  const Operator bt = s.to_eigenbasis(req.b);
  return s.from_eigenbasis(factorial(req.order) *
                           divided_difference_chains(req.f, s, bt, req.order));
}

Operator taylor_sum(const ScalarFunction& f, const Operator& a, const Operator& b, double x,
                    int n_terms) {
  if (n_terms < 0) throw DomainViolation("taylor_sum needs N >= 0");
  if (b.rows() != a.rows()) throw DimensionMismatch("A and B dimensions differ");
  const Spectrum s = spectral_decompose(a);
  check_domain(s, f, "taylor_sum");
  if (x != 0.0 && is_hermitian(b) && std::isfinite(f.domain_floor())) {
    check_domain(spectral_decompose(hermitian_part(a + x * b)), f, "taylor_sum at A + xB");
  }
  const Operator bt = s.to_eigenbasis(b);
  Operator acc = Operator::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i) acc(i, i) = f(s.eigenvalues(i));
  double xn = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    xn *= x;
    if (x == 0.0) break;
    acc += xn * divided_difference_chains(f, s, bt, n);
  }
  return s.from_eigenbasis(acc);
}

Operator ResponseExpansion::sum() const {
  Operator acc = terms.front();
  for (std::size_t n = 1; n < terms.size(); ++n) acc += terms[n];
  return acc;
}

ResponseExpansion nonlinear_response_density(const Operator& h, const Operator& q, double beta,
                                             double h_ext, int n_terms) {
  if (!(beta > 0.0)) throw DomainViolation("beta must be positive");
  if (n_terms < 0) throw DomainViolation("response order must be >= 0");
  check_hermitian(q, "response operator Q");
  if (q.rows() != h.rows()) throw DimensionMismatch("H and Q dimensions differ");
  // exp(-beta (H - h Q)) = f(H + x Q) with f(y) = exp(-beta y), x = -h.
  const ScalarFunction f = ScalarFunction::exp_scaled(-beta);
  const Spectrum s = spectral_decompose(h);
  const Operator qt = s.to_eigenbasis(q);
  ResponseExpansion out;
  out.terms.push_back(apply_scalar_function(s, f));
  double xn = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    xn *= -h_ext;
    out.terms.push_back(s.from_eigenbasis(xn * divided_difference_chains(f, s, qt, n)));
  }
  return out;
}

std::vector<Operator> formula_A_d2_terms(const ScalarFunction& f, const Operator& a,
                                         const Operator& b, int m_max) {
  if (m_max < 0) throw DomainViolation("Formula A needs M >= 0");
  if (b.rows() != a.rows()) throw DimensionMismatch("A and B dimensions differ");
  const Spectrum s = spectral_decompose(a);
  check_domain(s, f, "formula_A_d2");
  std::vector<Operator> terms;
  Operator d_pow = b;           // delta_A^j B
  Operator sm = b * b;          // S_0 = B.B
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) {
      d_pow = commutator(a, d_pow);
      // S_m = (delta^m B).B + delta_A S_{m-1}
      sm = d_pow * b + commutator(a, sm);
    }
    const double coeff = 2.0 * ((m % 2) ? -1.0 : 1.0) / factorial(m + 2);
    terms.push_back(coeff * apply_scalar_function(s, f, m + 2) * sm);
  }
  return terms;
}

Operator formula_A_d2(const ScalarFunction& f, const Operator& a, const Operator& b, int m_max) {
  const std::vector<Operator> terms = formula_A_d2_terms(f, a, b, m_max);
  Operator acc = terms.front();
  for (std::size_t m = 1; m < terms.size(); ++m) acc += terms[m];
  return acc;
}

std::vector<Operator> formula_A_terms(const ScalarFunction& f, const Operator& a,
                                      const Operator& b, int n, int m_max) {
  if (n < 1 || m_max < 0) throw DomainViolation("Formula A needs n >= 1 and m_max >= 0");
  if (b.rows() != a.rows()) throw DimensionMismatch("A and B dimensions differ");
  const Spectrum s = spectral_decompose(a);
  check_domain(s, f, "formula_A_terms");
  const int d = s.dim();
  check_chain_cost(d, n);
  // coeff(i0, m) = n! / (n+m)! f^{(n+m)}(l_i0)
  Eigen::MatrixXcd coeff(d, m_max + 1);
  for (int i = 0; i < d; ++i) {
    for (int m = 0; m <= m_max; ++m) {
      coeff(i, m) = factorial(n) / factorial(n + m) * f.derivative(n + m, s.eigenvalues(i));
    }
  }
  // In the eigenbasis, the m-th term of a chain is coeff * h_m(z) with
  // z_j = l_ij - l_i0: the Taylor coefficients of f[l_i0..l_in] about l_i0.
  std::vector<Operator> terms(m_max + 1, Operator::Zero(d, d));
  std::vector<double> z(n);
  const Operator bt = s.to_eigenbasis(b);
  for_each_chain(bt, n, [&](const std::vector<int>& idx, cplx w) {
    const double l0 = s.eigenvalues(idx[0]);
    for (int j = 1; j <= n; ++j) z[j - 1] = s.eigenvalues(idx[j]) - l0;
    const std::vector<double> h = complete_homogeneous_all(z, m_max);
    for (int m = 0; m <= m_max; ++m) terms[m](idx[0], idx[n]) += coeff(idx[0], m) * h[m] * w;
  });
  for (auto& t : terms) t = s.from_eigenbasis(t);
  return terms;
}

RootSequence alpha_n_estimate(const ScalarFunction& f, const Operator& a, const Operator& b,
                              int n, int m_max) {
  if (m_max < 1) throw DomainViolation("alpha_n_estimate needs m_max >= 1");
  const std::vector<Operator> terms = formula_A_terms(f, a, b, n, m_max);
  RootSequence out;
  // The estimate omits the n! carried by the expansion terms.
  const double scale = 1.0 / factorial(n);
  for (int m = 1; m <= m_max; ++m) {
    out.terms.push_back(std::pow(scale * operator_norm(terms[m]), 1.0 / m));
  }
  return out;
}

}  // namespace qa
