#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grbm/experiments.hpp"
#include "grbm/rng.hpp"
#include "grbm/table_io.hpp"

using namespace grbm;

namespace {

SweepSpec small_spec(SweepMode mode)
{
    SweepSpec spec;
    spec.mode = mode;
    spec.vary = VaryParam::W;
    spec.sd_grid = {0.1, 0.3};
    spec.n_visible = 8;
    spec.n_hidden = 5;
    spec.trials = 12;
    spec.seed = 321;
    return spec;
}

} // namespace

TEST_CASE("mse of hand-evaluated pairs")
{
    CHECK(mse(std::vector<double>{0, 0}, std::vector<double>{0, 0}) == 0.0);
    CHECK(mse(std::vector<double>{1, -1}, std::vector<double>{0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mse(std::vector<double>{2}, std::vector<double>{-1}) ==
          doctest::Approx(9.0).epsilon(1e-15));
    CHECK_THROWS_AS(mse(std::vector<double>{1, 2}, std::vector<double>{1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mse(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("run_trial edge instances")
{
    SolverOptions tight;
    tight.tol = 1e-13;
    tight.n_restarts = 2;

    // factorized: all three free energies coincide
    const GrbmParams pz = sample_params(6, 4, 0.4, 0.4, 0.0, 1.0, SampleSpace::binary(), 8);
    const TrialResult tz = run_trial(pz, tight);
    CHECK(std::abs(tz.type1.free_energy - tz.exact.free_energy) <= 1e-12);
    CHECK(std::abs(tz.type2.free_energy - tz.exact.free_energy) <= 1e-12);

    // single hidden unit: type II reproduces the exact marginal
    const GrbmParams p1 = sample_params(6, 1, 0.3, 0.3, 0.7, 1.0, SampleSpace::ternary(), 9);
    const TrialResult t1 = run_trial(p1, tight);
    CHECK(std::abs(t1.type2.m[0] - t1.exact.m_exact[0]) <= 1e-12);
    CHECK(std::abs(t1.type2.free_energy - t1.exact.free_energy) <= 1e-12);

    // the standard experiment geometry honors the bound chain
    const GrbmParams p = sample_params(24, 12, 0.1, 0.1, 0.1, 1.0, SampleSpace::binary(), 10);
    SolverOptions opts;
    const TrialResult tr = run_trial(p, opts);
    REQUIRE(tr.type1.converged);
    REQUIRE(tr.type2.converged);
    CHECK(tr.type1.free_energy >= tr.type2.free_energy - 1e-9);
    CHECK(tr.type2.free_energy >= tr.exact.free_energy - 1e-9);
}

TEST_CASE("a one-trial sweep equals the corresponding single trial")
{
    SweepSpec spec = small_spec(SweepMode::FreeEnergy);
    spec.trials = 1;
    const std::vector<SweepRow> rows = run_sweep(spec);
    REQUIRE(rows.size() == 2);

    for (std::size_t point = 0; point < rows.size(); ++point) {
        const std::uint64_t ts = sweep_trial_seed(spec.seed, point, 0);
        const GrbmParams params =
            sample_params(spec.n_visible, spec.n_hidden, spec.fixed_sd, spec.fixed_sd,
                          spec.sd_grid[point], spec.sigma2_value, spec.space, ts);
        SolverOptions solver = spec.solver;
        solver.seed = splitmix64(ts ^ spec.solver.seed);
        const TrialResult tr = run_trial(params, solver);
        CHECK(rows[point].f_exact_mean == tr.exact.free_energy);
        CHECK(rows[point].f1_mean == tr.type1.free_energy);
        CHECK(rows[point].f2_mean == tr.type2.free_energy);
        CHECK(rows[point].n_trials == 1);
    }
}

TEST_CASE("free-energy rows keep the bound chain and flag the other mode absent")
{
    const std::vector<SweepRow> rows = run_sweep(small_spec(SweepMode::FreeEnergy));
    for (const SweepRow& r : rows) {
        CHECK(r.n_unconverged == 0);
        CHECK(r.f1_mean >= r.f2_mean - 1e-9);
        CHECK(r.f2_mean >= r.f_exact_mean - 1e-9);
        CHECK(std::isnan(r.mse1_h));
        CHECK(std::isnan(r.mse2_v));
    }
}

TEST_CASE("mse rows are nonnegative and small errors shrink with the SD")
{
    SweepSpec spec = small_spec(SweepMode::Mse);
    spec.sd_grid = {0.05, 0.5};
    spec.trials = 20;
    const std::vector<SweepRow> rows = run_sweep(spec);
    REQUIRE(rows.size() == 2);
    for (const SweepRow& r : rows) {
        CHECK(r.mse1_h >= 0.0);
        CHECK(r.mse1_v >= 0.0);
        CHECK(r.mse2_h >= 0.0);
        CHECK(r.mse2_v >= 0.0);
        CHECK(std::isnan(r.f1_mean));
    }
    // weak-coupling exactness: every error grows from the small-SD end
    CHECK(rows[0].mse1_h <= rows[1].mse1_h);
    CHECK(rows[0].mse1_v <= rows[1].mse1_v);
    CHECK(rows[0].mse2_h <= rows[1].mse2_h);
    CHECK(rows[0].mse2_v <= rows[1].mse2_v);
}

TEST_CASE("free-energy gaps shrink with the SD as well")
{
    SweepSpec spec = small_spec(SweepMode::FreeEnergy);
    spec.sd_grid = {0.05, 0.5};
    spec.trials = 20;
    const std::vector<SweepRow> rows = run_sweep(spec);
    const double gap_small = rows[0].f1_mean - rows[0].f_exact_mean;
    const double gap_large = rows[1].f1_mean - rows[1].f_exact_mean;
    CHECK(gap_small >= -1e-9);
    CHECK(gap_small <= gap_large);
}

TEST_CASE("sweeps are deterministic and thread-count independent")
{
    SweepSpec spec = small_spec(SweepMode::FreeEnergy);
    spec.n_threads = 1;
    const std::vector<SweepRow> a = run_sweep(spec);
    spec.n_threads = 3;
    const std::vector<SweepRow> b = run_sweep(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].f_exact_mean == b[i].f_exact_mean);
        CHECK(a[i].f1_mean == b[i].f1_mean);
        CHECK(a[i].f2_mean == b[i].f2_mean);
        CHECK(a[i].n_unconverged == b[i].n_unconverged);
    }

    std::ostringstream s1, s2;
    write_sweep_table(s1, spec.mode, a);
    write_sweep_table(s2, spec.mode, b);
    CHECK(s1.str() == s2.str());
}

TEST_CASE("unconverged trials are counted, and strict mode drops them")
{
    SweepSpec spec = small_spec(SweepMode::FreeEnergy);
    spec.sd_grid = {0.4};
    spec.trials = 6;
    spec.solver.max_iter = 1; // force non-convergence
    const std::vector<SweepRow> rows = run_sweep(spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_unconverged == 6);
    CHECK(rows[0].n_trials == 6);
    CHECK(std::isfinite(rows[0].f1_mean)); // still averaged by default

    spec.strict = true;
    const std::vector<SweepRow> strict_rows = run_sweep(spec);
    CHECK(strict_rows[0].n_unconverged == 6);
    CHECK(std::isnan(strict_rows[0].f1_mean)); // nothing left to average
}

TEST_CASE("spec validation and capacity propagation")
{
    SweepSpec spec = small_spec(SweepMode::FreeEnergy);
    spec.sd_grid = {0.3, 0.1};
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec = small_spec(SweepMode::FreeEnergy);
    spec.trials = 0;
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec = small_spec(SweepMode::FreeEnergy);
    spec.sd_grid = {-0.1, 0.2};
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);

    spec = small_spec(SweepMode::FreeEnergy);
    spec.n_hidden = 26; // 2^26 states
    spec.trials = 1;
    CHECK_THROWS_AS(run_sweep(spec), CapacityError);
}

TEST_CASE("table output format")
{
    SweepSpec spec = small_spec(SweepMode::FreeEnergy);
    spec.trials = 2;
    const std::vector<SweepRow> rows = run_sweep(spec);

    std::ostringstream csv;
    write_sweep_table(csv, spec.mode, rows);
    const std::string text = csv.str();
    CHECK(text.rfind("sd,f_exact_mean,f1_mean,f2_mean,n_unconverged,n_trials\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3); // header + 2 rows

    std::ostringstream tsv;
    write_sweep_table(tsv, spec.mode, rows, '\t');
    CHECK(tsv.str().find('\t') != std::string::npos);
    CHECK(tsv.str().find(',') == std::string::npos);

    // 17 significant digits round-trip exactly
    const std::string printed = format_double(rows[0].f1_mean);
    CHECK(std::stod(printed) == rows[0].f1_mean);
    CHECK(format_double(0.1) == "0.10000000000000001");
}
