#pragma once

#include <cstddef>
#include <vector>

namespace exo {

struct AnovaResult {
    double F = 0.0;
    double p = 1.0;
    double eta_squared = 0.0;
    double ss_between = 0.0;
    double ss_within = 0.0;
    int df_between = 0;
    int df_within = 0;
};

/** Standard one-way between/within decomposition.
 *  Zero within-variance with unequal means reports F = +infinity, p = 0. */
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
};

/** Two-sample t, pooled (Student) by default or Welch; two-tailed p. */
TTestResult two_sample_t(const std::vector<double>& a,
                         const std::vector<double>& b, bool welch = false);

/** Regularized incomplete beta I_x(a, b) via Lentz continued fractions. */
double regularized_incomplete_beta(double a, double b, double x);

/** Upper tail of the F distribution (survival function). */
double f_survival(double F, double df1, double df2);

/** Two-tailed p for a t statistic. */
double t_two_tailed(double t, double df);

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample std (n-1); 0 by convention for n = 1
    double median = 0.0;
    double iqr = 0.0;     // linear-interpolation quartiles
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summarize(std::vector<double> values);

}  // namespace exo
