#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grbm/sample_space.hpp"

namespace grbm {

/// Full GRBM parameter set: biases b (visible) and c (hidden), couplings w,
/// visible variances sigma2, and the hidden alphabet. Immutable by
/// convention once built; safe to share across threads.
struct GrbmParams {
    std::size_t n_visible = 0;
    std::size_t n_hidden = 0;
    std::vector<double> b;      // |V|
    std::vector<double> c;      // |H|
    std::vector<double> w;      // |V| x |H|, row-major
    std::vector<double> sigma2; // |V|, all > 0
    SampleSpace space;

    GrbmParams(std::size_t n_visible, std::size_t n_hidden, std::vector<double> b,
               std::vector<double> c, std::vector<double> w, std::vector<double> sigma2,
               SampleSpace space);

    double w_at(std::size_t i, std::size_t j) const { return w[i * n_hidden + j]; }
};

/// Pairwise Boltzmann machine over the hidden units obtained by integrating
/// out the visible layer: fields B, self-quadratic terms D, couplings J
/// (symmetric, zero diagonal) and the Gaussian prefactor ln z_H.
struct MarginalBm {
    std::size_t n_hidden = 0;
    std::vector<double> B;  // |H|
    std::vector<double> D;  // |H|, all >= 0
    std::vector<double> J;  // |H| x |H|, row-major, J[j][j] = 0
    double log_zH = 0.0;

    double J_at(std::size_t j, std::size_t k) const { return J[j * n_hidden + k]; }
};

/// Energy E(v, h) of a joint configuration. Every h_j must be a member of
/// the alphabet; dimension mismatches throw std::invalid_argument.
double energy(std::span<const double> v, std::span<const double> h, const GrbmParams& params);

/// Conditional visible means mu_i(h) = b_i + sum_j w_ij h_j.
std::vector<double> visible_mean_given_hidden(const GrbmParams& params, std::span<const double> h);

/// Conditional hidden fields lambda_j(v) = c_j + sum_i (w_ij / sigma_i^2) v_i.
std::vector<double> hidden_field_given_visible(const GrbmParams& params,
                                               std::span<const double> v);

/// Integrates out the visible layer.
MarginalBm marginalize(const GrbmParams& params);

/// Random instance: b_i ~ N(0, sd_b^2), c_j ~ N(0, sd_c^2), w_ij ~ N(0, sd_w^2),
/// all sigma_i^2 = sigma2_value. One PRNG stream per instance; draw order is
/// b, then c, then w row-major, so results are reproducible given the seed.
GrbmParams sample_params(std::size_t n_visible, std::size_t n_hidden, double sd_b, double sd_c,
                         double sd_w, double sigma2_value, const SampleSpace& space,
                         std::uint64_t seed);

} // namespace grbm
