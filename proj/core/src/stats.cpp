#include <dsreg/stats.hpp>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include <dsreg/error.hpp>

namespace dsreg {

double normal_quantile(double prob)
{
    if (!(prob > 0.0 && prob < 1.0)) throw InvalidInput("normal_quantile: prob must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

double normal_cdf(double x)
{
    return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0) return 1.0;
    // Below 0.2 the alternating series converges slowly and the survival
    // equals 1 to double precision.
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty()) throw InvalidInput("ks_test: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double rn = std::sqrt(n);
    return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

KsResult ks_test_normal(std::vector<double> sample)
{
    return ks_test(std::move(sample), [](double x) { return normal_cdf(x); });
}

MeanStderr mean_stderr(const std::vector<double>& x)
{
    MeanStderr out;
    if (x.empty()) return out;
    double sum = 0.0;
    for (double v : x) sum += v;
    out.mean = sum / static_cast<double>(x.size());
    if (x.size() < 2) return out;
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    return out;
}

} // namespace dsreg
