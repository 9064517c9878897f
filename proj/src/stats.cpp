#include "conefpp/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "conefpp/errors.hpp"

namespace conefpp::stats {

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double acc = 0.0;
    for (double x : xs) acc += x;
    s.mean = acc / static_cast<double>(s.n);
    if (s.n < 2) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(s.n));
    return s;
}

double median(std::span<const double> xs) {
    CONEFPP_REQUIRE(!xs.empty(), "median: empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mad(std::span<const double> xs) {
    const double m = median(xs);
    std::vector<double> dev;
    dev.reserve(xs.size());
    for (double x : xs) dev.push_back(std::abs(x - m));
    return median(dev);
}

double median_stderr(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    // sigma ~ 1.4826 MAD; se(median) ~ sqrt(pi / 2) sigma / sqrt(n).
    const double sigma = 1.4826 * mad(xs);
    return std::sqrt(M_PI / 2.0) * sigma / std::sqrt(static_cast<double>(xs.size()));
}

Interval wilson(std::size_t k, std::size_t n, double level) {
    CONEFPP_REQUIRE(n > 0 && k <= n, "wilson: need 0 <= k <= n, n > 0");
    const boost::math::normal_distribution<> normal;
    const double z = boost::math::quantile(normal, 0.5 + level / 2.0);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

Interval t_interval(std::span<const double> xs, double level) {
    const Summary s = summarize(xs);
    CONEFPP_REQUIRE(s.n >= 2, "t_interval: need at least two values");
    const boost::math::students_t_distribution<> t(static_cast<double>(s.n - 1));
    const double q = boost::math::quantile(t, 0.5 + level / 2.0);
    return {s.mean - q * s.se, s.mean + q * s.se};
}

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    CONEFPP_REQUIRE(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
    CONEFPP_REQUIRE(x.size() == y.size() && x.size() >= 2, "ls_slope: need >= 2 paired values");
    const Summary sx = summarize(x), sy = summarize(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - sx.mean) * (y[i] - sy.mean);
        sxx += (x[i] - sx.mean) * (x[i] - sx.mean);
    }
    CONEFPP_REQUIRE(sxx > 0.0, "ls_slope: x values are all equal");
    return sxy / sxx;
}

}  // namespace conefpp::stats
