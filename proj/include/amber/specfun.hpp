#ifndef AMBER_SPECFUN_HPP
#define AMBER_SPECFUN_HPP

namespace amber {

// Natural log of a nonnegative function value. Exact zeros are carried as
// -infinity; valid inputs never produce NaN.
struct LogDensity {
    double value;
};

// Central chi-squared density with k degrees of freedom. Zero for x <= 0.
// Throws std::invalid_argument for k < 1 and divergent_point_error at the
// k = 1 origin singularity.
double central_chi2_pdf(double x, int k);
LogDensity central_chi2_logpdf(double x, int k);

// ln I_n(z) for integer order n >= 0, z >= 0. Evaluated as a bidirectional
// power-series sum in the log domain, anchored at the modal term, so it does
// not overflow for z well past the ~700 limit of I_n itself.
LogDensity bessel_i_log(int n, double z);

// Modified Bessel function K_0. Minimax rational approximations on (0,1] and
// (1,inf), see Russon and Blair, Chalk River Report AECL-3461, 1969.
// Underflows to 0 for very large z; throws std::domain_error for z <= 0.
double bessel_k0(double z);

// Regularized incomplete gamma functions P(s,x) and Q(s,x) = 1 - P(s,x),
// s > 0, x >= 0. Series for x < s+1, continued fraction otherwise.
double gamma_p(double s, double x);
double gamma_q(double s, double x);

// Generalized Marcum Q-function Q_M(a,b), M >= 1: the upper tail of a
// noncentral chi-squared law with 2M degrees of freedom and noncentrality
// a^2, evaluated at b^2. Poisson-mixture sum started at the modal index and
// expanded in both directions; absolute error ~1e-13.
double marcum_q(int m, double a, double b);

// Noncentral chi-squared log-density, degrees k (positive and even),
// noncentrality lambda >= 0. The default path sums the Poisson-weighted
// central chi-squared mixture; the _bessel variant evaluates the closed
// form through I_{k/2-1} and exists so the two routes can be checked
// against each other. lambda = 0 reduces exactly to the central density.
LogDensity noncentral_chi2_pdf_log(double x, int k, double lambda);
LogDensity noncentral_chi2_pdf_log_bessel(double x, int k, double lambda);

// CDF of the same law: 1 - Q_{k/2}(sqrt(lambda), sqrt(x)).
double noncentral_chi2_cdf(double x, int k, double lambda);

} // namespace amber

#endif
