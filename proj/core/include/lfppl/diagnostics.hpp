#ifndef LFPPL_DIAGNOSTICS_HPP
#define LFPPL_DIAGNOSTICS_HPP

#include <cstddef>
#include <vector>

namespace lfppl {

// Effective sample size by the initial-monotone-positive-sequence
// autocorrelation estimator.
double effective_sample_size(const std::vector<double>& series);

// Worst mean absolute error over the first n draws:
// (1/n) * max_d | sum_{i<n} dims[d][i] |.
double wmae(const std::vector<std::vector<double>>& dims, size_t n);

// Squared error of the running mean of each series against its reference,
// averaged over series, as a function of the sample count.
std::vector<double> running_mse(const std::vector<std::vector<double>>& series_by_var,
                                const std::vector<double>& reference_means);

}  // namespace lfppl

#endif
