#pragma once

#include <cstdint>
#include <vector>

#include "grbm/model.hpp"

namespace grbm {

/// Monte-Carlo estimates of <h_j> and <v_i> with batch-means standard errors.
struct GibbsEstimate {
    std::vector<double> m_hat;      // |H|
    std::vector<double> nu_hat;     // |V|
    std::vector<double> std_err_m;  // |H|
    std::vector<double> std_err_nu; // |V|
    std::size_t n_sweeps = 0;
};

/// Block Gibbs sampler: one sweep resamples the whole visible layer from its
/// Gaussian conditional, then the whole hidden layer from its per-unit
/// softmax conditional. Standard errors use 32 equal batches (fewer when
/// n_sweeps < 32). Deterministic given the seed.
GibbsEstimate gibbs_estimate(const GrbmParams& params, std::size_t n_sweeps,
                             std::size_t n_burnin, std::uint64_t seed);

} // namespace grbm
