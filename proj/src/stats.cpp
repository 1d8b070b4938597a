#include "exolink/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace exo {

namespace {

constexpr double kFpMin = 1e-300;
constexpr double kCfTolerance = 1e-10;  // continued-fraction convergence

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kCfTolerance) break;
    }
    return h;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    // linear interpolation between closest ranks (numpy's default)
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] -
                                                         sorted[lo]);
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double f_survival(double F, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0))
        throw std::invalid_argument("F needs positive degrees of freedom");
    if (std::isnan(F)) return std::numeric_limits<double>::quiet_NaN();
    if (F <= 0.0) return 1.0;
    if (std::isinf(F)) return 0.0;
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0,
                                       df2 / (df2 + df1 * F));
}

double t_two_tailed(double t, double df) {
    if (!(df > 0.0))
        throw std::invalid_argument("t needs positive degrees of freedom");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2)
        throw std::invalid_argument("ANOVA needs at least two groups");
    std::size_t total_n = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("ANOVA group is empty");
        total_n += g.size();
    }
    const int k = static_cast<int>(groups.size());
    const int df_within = static_cast<int>(total_n) - k;
    if (df_within < 1)
        throw std::invalid_argument("ANOVA needs residual degrees of freedom");

    double grand = 0.0;
    for (const auto& g : groups)
        for (double x : g) grand += x;
    grand /= static_cast<double>(total_n);

    AnovaResult r;
    r.df_between = k - 1;
    r.df_within = df_within;
    for (const auto& g : groups) {
        const double m = sample_mean(g);
        r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) r.ss_within += (x - m) * (x - m);
    }

    if (r.ss_within == 0.0) {
        if (r.ss_between == 0.0) {
            r.F = 0.0;
            r.p = 1.0;
            r.eta_squared = 0.0;
        } else {
            r.F = std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.eta_squared = 1.0;
        }
        return r;
    }
    const double ms_between = r.ss_between / r.df_between;
    const double ms_within = r.ss_within / r.df_within;
    r.F = ms_between / ms_within;
    r.p = f_survival(r.F, r.df_between, r.df_within);
    r.eta_squared = r.ss_between / (r.ss_between + r.ss_within);
    return r;
}

TTestResult two_sample_t(const std::vector<double>& a,
                         const std::vector<double>& b, bool welch) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("t test needs two samples of size >= 2");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    const double va = sample_variance(a, ma);
    const double vb = sample_variance(b, mb);

    TTestResult r;
    double se2;
    if (welch) {
        se2 = va / na + vb / nb;
        r.df = se2 > 0.0
                   ? se2 * se2 / ((va / na) * (va / na) / (na - 1.0) +
                                  (vb / nb) * (vb / nb) / (nb - 1.0))
                   : na + nb - 2.0;
    } else {
        const double pooled =
            ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        se2 = pooled * (1.0 / na + 1.0 / nb);
        r.df = na + nb - 2.0;
    }

    if (se2 == 0.0) {
        r.t = ma == mb ? 0.0
                       : std::copysign(std::numeric_limits<double>::infinity(),
                                       ma - mb);
        r.p = ma == mb ? 1.0 : 0.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(se2);
    r.p = t_two_tailed(r.t, r.df);
    return r;
}

SummaryStats summarize(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("cannot summarize an empty sample");
    std::sort(values.begin(), values.end());
    SummaryStats s;
    s.n = values.size();
    s.mean = sample_mean(values);
    s.stddev = values.size() > 1 ? std::sqrt(sample_variance(values, s.mean))
                                 : 0.0;
    s.median = quantile_sorted(values, 0.5);
    s.iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
    s.min = values.front();
    s.max = values.back();
    return s;
}

}  // namespace exo
