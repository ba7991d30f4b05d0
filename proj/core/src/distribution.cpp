#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "mathds/errors.hpp"
#include "mathds/loadings.hpp"

namespace mathds {

DistributionFit fit_distribution(std::vector<double> samples, DistributionFamily family) {
    const std::size_t n = samples.size();
    if (n < 100) throw DomainError("fit_distribution: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0)) throw DomainError("fit_distribution: zero variance");

    DistributionFit fit;
    fit.family = family;
    std::function<double(double)> cdf;
    if (family == DistributionFamily::normal) {
        fit.param1 = mean;
        fit.param2 = std::sqrt(var);
        cdf = [&](double x) { return 0.5 * std::erfc(-(x - fit.param1) / (fit.param2 * std::sqrt(2.0))); };
    } else {
        if (!(mean > 0.0)) throw DomainError("fit_distribution: gamma fit needs a positive mean");
        fit.param1 = mean * mean / var;
        fit.param2 = var / mean;
        cdf = [&](double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(fit.param1, x / fit.param2); };
    }

    double ks = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        ks = std::max({ks, static_cast<double>(i + 1) / dn - f, f - static_cast<double>(i) / dn});
    }
    fit.ks_statistic = ks;
    return fit;
}

}  // namespace mathds
