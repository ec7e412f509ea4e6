#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grbm/exact.hpp"
#include "grbm/meanfield.hpp"
#include "grbm/model.hpp"

namespace grbm {

enum class SweepMode { FreeEnergy, Mse };
enum class VaryParam { W, B, C };

/// One parameter-sweep experiment: for each SD on the grid, draw `trials`
/// instances with the varied family at that SD and the other two families
/// at fixed_sd, run exact and both mean-field inferences, and average.
struct SweepSpec {
    SweepMode mode = SweepMode::FreeEnergy;
    VaryParam vary = VaryParam::W;
    std::vector<double> sd_grid = {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
    double fixed_sd = 0.1;
    std::size_t n_visible = 24;
    std::size_t n_hidden = 12;
    SampleSpace space = SampleSpace::binary();
    std::size_t trials = 1000;
    double sigma2_value = 1.0;
    SolverOptions solver;
    std::uint64_t seed = 0;
    bool strict = false; // exclude unconverged trials from the averages
    std::uint64_t state_cap = kDefaultStateCap;
    std::size_t n_threads = 0; // 0 = hardware concurrency
};

/// One aggregated output row. Fields of the inactive mode are NaN.
struct SweepRow {
    double sd = 0.0;
    double f_exact_mean = 0.0;
    double f1_mean = 0.0;
    double f2_mean = 0.0;
    double mse1_h = 0.0;
    double mse1_v = 0.0;
    double mse2_h = 0.0;
    double mse2_v = 0.0;
    std::size_t n_unconverged = 0;
    std::size_t n_trials = 0;
};

/// Mean squared componentwise difference.
double mse(std::span<const double> exact, std::span<const double> approx);

struct TrialResult {
    ExactMoments exact;
    MfSolution type1;
    MfSolution type2;
};

/// All three inference results on one instance. Both solvers receive the
/// same derived seed, hence the same restart initialization sequence, so the
/// per-instance comparison of the two schemes is paired.
TrialResult run_trial(const GrbmParams& params, const SolverOptions& solver,
                      std::uint64_t state_cap = kDefaultStateCap);

/// Instance seed of trial `trial` at grid point `point` for a sweep with
/// base seed `base`. The same scheme is used inside run_sweep, so any single
/// sweep trial can be reproduced in isolation: the instance is
/// sample_params(..., sweep_trial_seed(base, point, trial)) and the solver
/// seed is splitmix64(trial_seed ^ spec.solver.seed).
std::uint64_t sweep_trial_seed(std::uint64_t base, std::size_t point, std::size_t trial);

/// Per-trial seeds follow a documented counter scheme,
/// splitmix64(spec.seed ^ mixed point/trial counters), so any (seed, point,
/// trial) triple maps to the same instance regardless of thread count;
/// per-trial results are reduced in trial-index order, making the output
/// deterministic. Trials run on spec.n_threads workers.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

} // namespace grbm
