#pragma once

#include <functional>
#include <vector>

namespace dsreg {

/// Standard normal quantile and CDF (Boost.Math).
double normal_quantile(double prob);
double normal_cdf(double x);

struct KsResult
{
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
///
/// The p-value uses the asymptotic Kolmogorov series at
/// (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * D, which is accurate to a few
/// parts in a thousand for n >= 5 in the region that matters for testing.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_test_normal(std::vector<double> sample);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

struct MeanStderr
{
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Sample mean and its standard error (sample sd / sqrt(n)); stderr is 0 for n < 2.
MeanStderr mean_stderr(const std::vector<double>& x);

} // namespace dsreg
