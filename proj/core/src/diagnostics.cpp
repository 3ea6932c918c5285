#include "lfppl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lfppl/errors.hpp"

namespace lfppl {

double effective_sample_size(const std::vector<double>& series) {
    const size_t n = series.size();
    if (n < 4) return static_cast<double>(n);

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);

    auto autocov = [&](size_t lag) {
        double c = 0.0;
        for (size_t i = 0; i + lag < n; ++i)
            c += (series[i] - mean) * (series[i + lag] - mean);
        return c / static_cast<double>(n);
    };

    double c0 = autocov(0);
    if (c0 <= 0.0) return static_cast<double>(n);

    // Sum paired autocorrelations while the pair sums stay positive and
    // monotonically decreasing.
    double rho_sum = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (size_t k = 1; k + 1 < n; k += 2) {
        double pair = (autocov(k) + autocov(k + 1)) / c0;
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        rho_sum += pair;
        prev_pair = pair;
    }
    double ess = static_cast<double>(n) / (1.0 + 2.0 * rho_sum);
    return std::clamp(ess, 1.0, static_cast<double>(n));
}

double wmae(const std::vector<std::vector<double>>& dims, size_t n) {
    if (dims.empty() || n == 0) throw eval_error("wmae needs at least one sample");
    double worst = 0.0;
    for (const auto& d : dims) {
        if (d.size() < n) throw eval_error("wmae: dimension shorter than n");
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) sum += d[i];
        worst = std::max(worst, std::abs(sum));
    }
    return worst / static_cast<double>(n);
}

std::vector<double> running_mse(const std::vector<std::vector<double>>& series_by_var,
                                const std::vector<double>& reference_means) {
    if (series_by_var.size() != reference_means.size())
        throw eval_error("running_mse: reference does not cover the series");
    if (series_by_var.empty()) throw eval_error("running_mse: no series");
    const size_t n = series_by_var[0].size();
    for (const auto& s : series_by_var)
        if (s.size() != n) throw eval_error("running_mse: unequal series lengths");

    std::vector<double> out(n);
    std::vector<double> sums(series_by_var.size(), 0.0);
    for (size_t i = 0; i < n; ++i) {
        double mse = 0.0;
        for (size_t v = 0; v < series_by_var.size(); ++v) {
            sums[v] += series_by_var[v][i];
            double err = sums[v] / static_cast<double>(i + 1) - reference_means[v];
            mse += err * err;
        }
        out[i] = mse / static_cast<double>(series_by_var.size());
    }
    return out;
}

}  // namespace lfppl
