#include "amber/specfun.hpp"
#include "amber/errors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace amber {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453094172321214581766;

// Coefficients in increasing order, as in boost::math::tools::evaluate_polynomial.
template <int N>
double poly_eval(const double (&c)[N], double x) {
    double r = c[N - 1];
    for (int i = N - 2; i >= 0; --i) r = r * x + c[i];
    return r;
}

struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

} // namespace

double central_chi2_pdf(double x, int k) {
    LogDensity lp = central_chi2_logpdf(x, k);
    return std::exp(lp.value);
}

LogDensity central_chi2_logpdf(double x, int k) {
    if (k < 1) throw std::invalid_argument("central_chi2_pdf: degrees k must be >= 1");
    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw std::invalid_argument("central_chi2_pdf: x is NaN");
        return {kNegInf};
    }
    if (x == 0.0 && k == 1)
        throw divergent_point_error("central_chi2_pdf: density diverges at x = 0 for k = 1");
    if (x <= 0.0) return {kNegInf};
    double h = 0.5 * k;
    return {(h - 1.0) * std::log(x) - 0.5 * x - h * kLn2 - std::lgamma(h)};
}

LogDensity bessel_i_log(int n, double z) {
    if (n < 0) throw std::invalid_argument("bessel_i_log: order must be >= 0");
    if (!(z >= 0.0) || !std::isfinite(z))
        throw std::domain_error("bessel_i_log: argument must be finite and >= 0");
    if (z == 0.0) return {n == 0 ? 0.0 : kNegInf};

    // I_n(z) = sum_i (z/2)^(n+2i) / (i! (n+i)!). Terms peak near
    // (i+1)(n+i+1) = (z/2)^2; anchor there and expand both ways so the
    // partial sums stay O(1) relative to the peak.
    const double L = std::log(0.5 * z);
    const double q = 0.25 * z * z;
    double u = 0.5 * (-n + std::sqrt(static_cast<double>(n) * n + z * z));
    long long i0 = static_cast<long long>(std::floor(u - 1.0));
    if (i0 < 0) i0 = 0;

    const double t0 = (n + 2.0 * i0) * L - std::lgamma(i0 + 1.0) - std::lgamma(n + i0 + 1.0);

    KahanSum sum;
    sum.add(1.0); // anchor term, exp(t0 - t0)

    // upward from i0
    double rel = 0.0; // log(term / anchor)
    for (long long i = i0;; ++i) {
        rel += std::log(q / ((i + 1.0) * (n + i + 1.0)));
        double term = std::exp(rel);
        sum.add(term);
        if (term < 1e-20 * sum.s) break;
        if (i - i0 > 100000000LL)
            throw convergence_error("bessel_i_log: series failed to converge");
    }
    // downward from i0
    rel = 0.0;
    for (long long i = i0; i > 0; --i) {
        rel += std::log((i * (n + i + 0.0)) / q);
        double term = std::exp(rel);
        sum.add(term);
        if (term < 1e-20 * sum.s) break;
    }
    return {t0 + std::log(sum.s)};
}

double bessel_k0(double z) {
    // Minimax rational approximations, Russon and Blair, AECL-3461 (1969);
    // the same tables are used by boost::math and netlib.
    static const double P1[] = {
        2.4708152720399552679e+03, 5.9169059852270512312e+03,
        4.6850901201934832188e+02, 1.1999463724910714109e+01,
        1.3166052564989571850e-01, 5.8599221412826100000e-04};
    static const double Q1[] = {
        2.1312714303849120380e+04, -2.4994418972832303646e+02, 1.0};
    static const double P2[] = {
        -1.6128136304458193998e+06, -3.7333769444840079748e+05,
        -1.7984434409411765813e+04, -2.9501657892958843865e+02,
        -1.6414452837299064100e+00};
    static const double Q2[] = {
        -1.6128136304458193998e+06, 2.9865713163054025489e+04,
        -2.5064972445877992730e+02, 1.0};
    static const double P3[] = {
        1.1600249425076035558e+02, 2.3444738764199315021e+03,
        1.8321525870183537725e+04, 7.1557062783764037541e+04,
        1.5097646353289914539e+05, 1.7398867902565686251e+05,
        1.0577068948034021957e+05, 3.1075408980684392399e+04,
        3.6832589957340267940e+03, 1.1394980557384778174e+02};
    static const double Q3[] = {
        9.2556599177304839811e+01, 1.8821890840982713696e+03,
        1.4847228371802360957e+04, 5.8824616785857027752e+04,
        1.2689839587977598727e+05, 1.5144644673520157801e+05,
        9.7418829762268075784e+04, 3.1474655750295278825e+04,
        4.4329628889746408858e+03, 2.0013443064949242491e+02, 1.0};

    if (!(z > 0.0))
        throw std::domain_error("bessel_k0: argument must be > 0 (logarithmic singularity at 0)");
    if (z <= 1.0) {
        double y = z * z;
        double r1 = poly_eval(P1, y) / poly_eval(Q1, y);
        double r2 = poly_eval(P2, y) / poly_eval(Q2, y);
        return r1 - std::log(z) * r2;
    }
    double y = 1.0 / z;
    double r = poly_eval(P3, y) / poly_eval(Q3, y);
    return std::exp(-z) / std::sqrt(z) * r; // underflows to 0 for z >~ 705
}

namespace {

// Regularized lower incomplete gamma by power series (x < s+1).
double gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < 10000000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw convergence_error("gamma_p: series did not converge");
}

// Regularized upper incomplete gamma by modified Lentz continued fraction
// (x >= s+1).
double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000000; ++i) {
        double an = -static_cast<double>(i) * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw convergence_error("gamma_q: continued fraction did not converge");
}

} // namespace

double gamma_p(double s, double x) {
    if (!(s > 0.0) || x < 0.0 || !std::isfinite(s) || std::isnan(x))
        throw std::invalid_argument("gamma_p: require s > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_cf(s, x);
}

double gamma_q(double s, double x) {
    if (!(s > 0.0) || x < 0.0 || !std::isfinite(s) || std::isnan(x))
        throw std::invalid_argument("gamma_q: require s > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (!std::isfinite(x)) return 0.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

double marcum_q(int m, double a, double b) {
    if (m < 1) throw std::invalid_argument("marcum_q: degree M must be >= 1");
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("marcum_q: require finite a >= 0, b >= 0");
    if (b == 0.0) return 1.0;

    const double y = 0.5 * b * b;
    if (a == 0.0) return gamma_q(static_cast<double>(m), y);
    const double x = 0.5 * a * a; // Poisson mean of the mixture index

    // Q_M(a,b) = sum_k Pois(k; x) Q(M+k, y), with Q the regularized upper
    // gamma. Both factors recurse cheaply in k, so anchor at the Poisson
    // mode and expand outward until the neglected mass is < 1e-16 of the sum.
    long long k0 = static_cast<long long>(std::floor(x));
    const double logy = std::log(y);

    double w0 = std::exp(-x + k0 * std::log(x) - std::lgamma(k0 + 1.0));
    double q0 = gamma_q(static_cast<double>(m) + k0, y);
    // t(s) = y^s e^{-y} / s!  steps Q(s,y) -> Q(s+1,y)
    double t_up = std::exp((m + k0) * logy - y - std::lgamma(m + k0 + 1.0));

    KahanSum sum;
    KahanSum mass;
    sum.add(w0 * q0);
    mass.add(w0);

    // downward: k0-1 .. 0
    {
        double w = w0;
        KahanSum q;
        q.add(q0);
        double t = t_up * (m + k0) / y; // t(m+k0-1)
        for (long long k = k0 - 1; k >= 0; --k) {
            w *= (k + 1.0) / x;
            q.add(-t);
            t *= (m + k + 0.0) / y;
            double qv = q.s > 0.0 ? q.s : 0.0;
            sum.add(w * qv);
            mass.add(w);
            // Below this index the Q factors only shrink, so the sum is
            // done; the skipped Poisson mass still has to be accounted for
            // (the saturation shortcut in the up pass uses it). P(K <= k-1)
            // for K ~ Poisson(x) is gamma_q(k, x).
            if ((qv == 0.0 || w < 1e-18) && k > 0) {
                mass.add(gamma_q(static_cast<double>(k), x));
                break;
            }
        }
    }
    // upward: k0+1 ..
    {
        double w = w0;
        KahanSum q;
        q.add(q0);
        double t = t_up;
        for (long long k = k0 + 1;; ++k) {
            w *= x / static_cast<double>(k);
            q.add(t);
            t *= y / (m + k + 0.0);
            double qv = q.s < 1.0 ? q.s : 1.0;
            if (qv >= 1.0 - 5e-16) {
                // every remaining Q is within 5e-16 of this one; close the
                // sum with the exact leftover Poisson mass
                double rest = 1.0 - mass.s - w;
                if (rest < 0.0) rest = 0.0;
                sum.add(w * qv);
                sum.add(rest * qv);
                mass.add(w + rest);
                break;
            }
            sum.add(w * qv);
            mass.add(w);
            if (k > static_cast<long long>(x)) {
                double r = x / (k + 1.0);
                double tail = w * r / (1.0 - r);
                if (tail < 1e-16 * sum.s + 1e-300) break;
            }
            if (k - k0 > 100000000LL)
                throw convergence_error("marcum_q: mixture sum did not converge");
        }
    }

    double v = sum.s;
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

namespace {

void check_ncx2_params(int k, double lambda) {
    if (k < 2 || (k % 2) != 0)
        throw std::invalid_argument("noncentral_chi2: degrees k must be a positive even integer");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("noncentral_chi2: noncentrality must be finite and >= 0");
}

} // namespace

LogDensity noncentral_chi2_pdf_log(double x, int k, double lambda) {
    check_ncx2_params(k, lambda);
    if (lambda == 0.0) return central_chi2_logpdf(x, k);
    if (std::isnan(x)) throw std::invalid_argument("noncentral_chi2_pdf_log: x is NaN");
    if (x <= 0.0 || !std::isfinite(x)) return {kNegInf};

    // Poisson(lambda/2) mixture of central chi-squared densities:
    //   term(i) = C + i*ln(lambda x / 4) - ln i! - ln Gamma(k/2 + i)
    const double h = 0.5 * k;
    const double C = -0.5 * (lambda + x) + (h - 1.0) * std::log(x) - h * kLn2;
    const double q = 0.25 * lambda * x;
    const double lq = std::log(q);

    double u = 0.5 * (-(h - 1.0) + std::sqrt((h - 1.0) * (h - 1.0) + lambda * x));
    long long i0 = static_cast<long long>(std::floor(u - 1.0));
    if (i0 < 0) i0 = 0;

    const double t0 = i0 * lq - std::lgamma(i0 + 1.0) - std::lgamma(h + i0);

    KahanSum sum;
    sum.add(1.0);
    double rel = 0.0;
    for (long long i = i0;; ++i) {
        rel += lq - std::log((i + 1.0) * (h + i));
        double term = std::exp(rel);
        sum.add(term);
        if (term < 1e-20 * sum.s) break;
        if (i - i0 > 100000000LL)
            throw convergence_error("noncentral_chi2_pdf_log: mixture did not converge");
    }
    rel = 0.0;
    for (long long i = i0; i > 0; --i) {
        rel += std::log(i * (h + i - 1.0)) - lq;
        double term = std::exp(rel);
        sum.add(term);
        if (term < 1e-20 * sum.s) break;
    }
    return {C + t0 + std::log(sum.s)};
}

LogDensity noncentral_chi2_pdf_log_bessel(double x, int k, double lambda) {
    check_ncx2_params(k, lambda);
    if (lambda == 0.0) return central_chi2_logpdf(x, k);
    if (std::isnan(x)) throw std::invalid_argument("noncentral_chi2_pdf_log_bessel: x is NaN");
    if (x <= 0.0 || !std::isfinite(x)) return {kNegInf};
    // f = 1/2 e^{-(x+lambda)/2} (x/lambda)^{k/4-1/2} I_{k/2-1}(sqrt(lambda x))
    double v = -kLn2 - 0.5 * (x + lambda) + (0.25 * k - 0.5) * std::log(x / lambda) +
               bessel_i_log(k / 2 - 1, std::sqrt(lambda * x)).value;
    return {v};
}

double noncentral_chi2_cdf(double x, int k, double lambda) {
    check_ncx2_params(k, lambda);
    if (std::isnan(x)) throw std::invalid_argument("noncentral_chi2_cdf: x is NaN");
    if (x <= 0.0) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    return 1.0 - marcum_q(k / 2, std::sqrt(lambda), std::sqrt(x));
}

} // namespace amber
