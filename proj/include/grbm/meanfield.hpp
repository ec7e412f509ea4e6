#pragma once

#include <cstdint>
#include <vector>

#include "grbm/model.hpp"

namespace grbm {

enum class MfVariant { TypeI, TypeII };

/// Fixed-point iteration controls. Damping is the fraction of the old
/// iterate retained on each synchronous update; restart 0 starts from m = 0
/// and later restarts from uniform random vectors inside the alphabet hull.
struct SolverOptions {
    double damping = 0.5;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    std::size_t n_restarts = 5;
    double init_scale = 1.0;
    std::uint64_t seed = 0;
};

/// Converged (or best-effort) mean-field state. m and s are the hidden
/// means and second moments, nu the visible means, free_energy the
/// variational value of the corresponding scheme.
struct MfSolution {
    MfVariant variant = MfVariant::TypeI;
    std::vector<double> m;  // |H|
    std::vector<double> s;  // |H|
    std::vector<double> nu; // |V|
    double free_energy = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0.0; // max-abs fixed-point residual at the returned m
};

/// Moments and negative entropy of the single-unit distribution
/// u(h) proportional to exp(linear_field * h + quad_field * h^2) over the alphabet.
struct HiddenUnitStats {
    double mean = 0.0;
    double second_moment = 0.0;
    double neg_entropy = 0.0; // sum_h u(h) ln u(h)
};

HiddenUnitStats hidden_unit_stats(double linear_field, double quad_field,
                                  const SampleSpace& space);

/// Naive mean field over the whole system: fully factorized test
/// distribution over both layers. Returns the lowest-free-energy converged
/// restart, or the best-residual run flagged converged = false.
MfSolution solve_type1(const GrbmParams& params, const SolverOptions& opts);

/// Naive mean field over the marginal hidden-layer Boltzmann machine; the
/// visible conditional is kept exact and nu is recovered as mu(m).
MfSolution solve_type2(const GrbmParams& params, const SolverOptions& opts);

/// Variational free energy of the whole-system scheme, evaluated in closed
/// form at the factorized test distribution determined by solution.m.
double free_energy_type1(const GrbmParams& params, const MfSolution& solution);

/// Variational free energy of the marginalized scheme at the test
/// distribution determined by solution.m.
double free_energy_type2(const GrbmParams& params, const MfSolution& solution);

/// Minimized Kullback-Leibler divergence of an approximation, as the excess
/// of its variational free energy over the true free energy.
double kld_gap(double mf_free_energy, double true_free_energy);

} // namespace grbm
