#pragma once

// Single and two-component (mixed) Poisson models of multipath arrival
// times, fitted to inter-arrival gaps. Rates are per nanosecond.

#include "mmenc/extraction.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mmenc {

struct ArrivalFit {
    double lambda = 0.0;  ///< single-Poisson rate, 1/ns
    double lambda1 = 0.0; ///< slower mixture component, 1/ns
    double lambda2 = 0.0; ///< faster mixture component, 1/ns (lambda1 <= lambda2)
    double b = 0.0;       ///< probability of the lambda1 component
    double single_log_likelihood = 0.0;
    double mixture_log_likelihood = 0.0;
    std::size_t n_gaps = 0;
    int iterations = 0;     ///< EM iterations of the winning start
    bool converged = false; ///< false: iteration cap hit, best iterate reported
};

struct EmOptions {
    int max_iterations = 500;
    double tolerance = 1e-9; ///< on the per-gap log-likelihood improvement
    int random_restarts = 8;
    std::uint64_t seed = 0;
};

/// Gaps t_n - t_{n-1} between consecutive paths, in ns.
std::vector<double> inter_arrivals_ns(const MultipathProfile& profile);

double exponential_log_likelihood(std::span<const double> gaps_ns, double lambda);
double mixture_log_likelihood(std::span<const double> gaps_ns, double lambda1, double lambda2, double b);

/// Requires at least 2 strictly positive gaps.
ArrivalFit fit_interarrivals(std::span<const double> gaps_ns, const EmOptions& opt = {});

/// Requires at least 3 paths.
ArrivalFit fit_arrivals(const MultipathProfile& profile, const EmOptions& opt = {});

} // namespace mmenc
