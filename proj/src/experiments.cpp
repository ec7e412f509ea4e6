#include "grbm/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "grbm/rng.hpp"

namespace grbm {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

// Seed-derivation constants for the counter scheme; arbitrary odd values,
// distinct per stream.
constexpr std::uint64_t kPointStream = 0xA24BAED4963EE407ull;
constexpr std::uint64_t kTrialStream = 0x9FB21C651E98DF25ull;
constexpr std::uint64_t kSolverStream = 0xD1B54A32D192ED03ull;

void check_spec(const SweepSpec& spec)
{
    if (spec.sd_grid.empty())
        throw std::invalid_argument("SweepSpec: sd_grid must be nonempty");
    double prev = 0.0;
    for (double sd : spec.sd_grid) {
        if (!(sd > prev))
            throw std::invalid_argument("SweepSpec: sd_grid must be positive, strictly increasing");
        prev = sd;
    }
    if (spec.trials == 0)
        throw std::invalid_argument("SweepSpec: trials must be >= 1");
    if (spec.n_visible == 0 || spec.n_hidden == 0)
        throw std::invalid_argument("SweepSpec: geometry must be positive");
    if (!(spec.fixed_sd >= 0.0))
        throw std::invalid_argument("SweepSpec: fixed_sd must be nonnegative");
    if (!(spec.sigma2_value > 0.0))
        throw std::invalid_argument("SweepSpec: sigma2_value must be positive");
}

struct TrialStats {
    double f_exact = 0.0, f1 = 0.0, f2 = 0.0;
    double mse1_h = 0.0, mse1_v = 0.0, mse2_h = 0.0, mse2_v = 0.0;
    bool unconverged = false;
};

} // namespace

double mse(std::span<const double> exact, std::span<const double> approx)
{
    if (exact.size() != approx.size() || exact.empty())
        throw std::invalid_argument("mse: vectors must have equal nonzero length");
    double acc = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double d = exact[i] - approx[i];
        acc += d * d;
    }
    return acc / static_cast<double>(exact.size());
}

std::uint64_t sweep_trial_seed(std::uint64_t base, std::size_t point, std::size_t trial)
{
    const std::uint64_t p = splitmix64(base ^ (kPointStream * (point + 1)));
    return splitmix64(p ^ (kTrialStream * (trial + 1)));
}

TrialResult run_trial(const GrbmParams& params, const SolverOptions& solver,
                      std::uint64_t state_cap)
{
    TrialResult out{.exact = exact_moments(params, state_cap), .type1 = {}, .type2 = {}};
    SolverOptions opts = solver;
    opts.seed = splitmix64(solver.seed ^ kSolverStream);
    out.type1 = solve_type1(params, opts);
    out.type2 = solve_type2(params, opts);
    return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec)
{
    check_spec(spec);

    std::size_t n_threads = spec.n_threads;
    if (n_threads == 0) {
        n_threads = std::thread::hardware_concurrency();
        if (n_threads == 0)
            n_threads = 1;
    }
    n_threads = std::min(n_threads, spec.trials);

    std::vector<SweepRow> rows;
    rows.reserve(spec.sd_grid.size());

    for (std::size_t p = 0; p < spec.sd_grid.size(); ++p) {
        const double sd = spec.sd_grid[p];
        const double sd_b = spec.vary == VaryParam::B ? sd : spec.fixed_sd;
        const double sd_c = spec.vary == VaryParam::C ? sd : spec.fixed_sd;
        const double sd_w = spec.vary == VaryParam::W ? sd : spec.fixed_sd;

        std::vector<TrialStats> stats(spec.trials);
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;

        auto worker = [&]() {
            try {
                while (true) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= spec.trials)
                        return;
                    const std::uint64_t ts = sweep_trial_seed(spec.seed, p, t);
                    const GrbmParams params =
                        sample_params(spec.n_visible, spec.n_hidden, sd_b, sd_c, sd_w,
                                      spec.sigma2_value, spec.space, ts);
                    SolverOptions solver = spec.solver;
                    solver.seed = splitmix64(ts ^ spec.solver.seed);
                    const TrialResult tr = run_trial(params, solver, spec.state_cap);

                    TrialStats& st = stats[t];
                    st.unconverged = !(tr.type1.converged && tr.type2.converged);
                    if (spec.mode == SweepMode::FreeEnergy) {
                        st.f_exact = tr.exact.free_energy;
                        st.f1 = tr.type1.free_energy;
                        st.f2 = tr.type2.free_energy;
                    } else {
                        st.mse1_h = mse(tr.exact.m_exact, tr.type1.m);
                        st.mse1_v = mse(tr.exact.nu_exact, tr.type1.nu);
                        st.mse2_h = mse(tr.exact.m_exact, tr.type2.m);
                        st.mse2_v = mse(tr.exact.nu_exact, tr.type2.nu);
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                next.store(spec.trials); // stop remaining work
            }
        };

        if (n_threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(n_threads);
            for (std::size_t i = 0; i < n_threads; ++i)
                pool.emplace_back(worker);
            for (std::thread& th : pool)
                th.join();
        }
        if (first_error)
            std::rethrow_exception(first_error);

        // reduce in trial-index order so the result does not depend on the
        // worker count
        SweepRow row;
        row.sd = sd;
        row.n_trials = spec.trials;
        std::size_t n_averaged = 0;
        double f_exact = 0.0, f1 = 0.0, f2 = 0.0;
        double m1h = 0.0, m1v = 0.0, m2h = 0.0, m2v = 0.0;
        for (const TrialStats& st : stats) {
            if (st.unconverged)
                ++row.n_unconverged;
            if (spec.strict && st.unconverged)
                continue;
            ++n_averaged;
            f_exact += st.f_exact;
            f1 += st.f1;
            f2 += st.f2;
            m1h += st.mse1_h;
            m1v += st.mse1_v;
            m2h += st.mse2_h;
            m2v += st.mse2_v;
        }
        // NaN marks fields of the inactive mode, and every mean when strict
        // filtering left nothing to average
        const double denom =
            n_averaged > 0 ? static_cast<double>(n_averaged) : std::numeric_limits<double>::quiet_NaN();
        if (spec.mode == SweepMode::FreeEnergy) {
            row.f_exact_mean = f_exact / denom;
            row.f1_mean = f1 / denom;
            row.f2_mean = f2 / denom;
            row.mse1_h = row.mse1_v = row.mse2_h = row.mse2_v = kAbsent;
        } else {
            row.mse1_h = m1h / denom;
            row.mse1_v = m1v / denom;
            row.mse2_h = m2h / denom;
            row.mse2_v = m2v / denom;
            row.f_exact_mean = row.f1_mean = row.f2_mean = kAbsent;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace grbm
