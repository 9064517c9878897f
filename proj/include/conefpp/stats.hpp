#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace conefpp::stats {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;      // sample standard deviation (n - 1)
    double se = 0.0;  // standard error, sd / sqrt(n)
};

Summary summarize(std::span<const double> xs);

double median(std::span<const double> xs);
// Median absolute deviation (unscaled).
double mad(std::span<const double> xs);
// Standard error of the sample median, from the MAD under a normal model.
double median_stderr(std::span<const double> xs);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for k successes out of n.
Interval wilson(std::size_t k, std::size_t n, double level = 0.95);

// Student-t interval for the mean.
Interval t_interval(std::span<const double> xs, double level = 0.95);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic distribution.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace conefpp::stats
