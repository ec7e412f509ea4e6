#include "grbm/meanfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grbm/rng.hpp"

namespace grbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_options(const SolverOptions& opts)
{
    if (!(opts.damping >= 0.0 && opts.damping < 1.0))
        throw std::invalid_argument("SolverOptions: damping must lie in [0, 1)");
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("SolverOptions: tol must be positive");
    if (opts.max_iter == 0)
        throw std::invalid_argument("SolverOptions: max_iter must be positive");
    if (opts.n_restarts == 0)
        throw std::invalid_argument("SolverOptions: n_restarts must be positive");
    if (!(opts.init_scale >= 0.0))
        throw std::invalid_argument("SolverOptions: init_scale must be nonnegative");
}

void check_solution(const GrbmParams& params, const MfSolution& sol, MfVariant expected)
{
    if (sol.variant != expected)
        throw std::invalid_argument("free energy evaluator: solution variant mismatch");
    if (sol.m.size() != params.n_hidden)
        throw std::invalid_argument("free energy evaluator: m has wrong length");
}

// w_ij / sigma_i^2, row-major like w itself.
std::vector<double> scaled_couplings(const GrbmParams& params)
{
    std::vector<double> winv(params.w.size());
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        const double inv_s2 = 1.0 / params.sigma2[i];
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            winv[i * params.n_hidden + j] = params.w_at(i, j) * inv_s2;
    }
    return winv;
}

void visible_means(const GrbmParams& params, const std::vector<double>& m,
                   std::vector<double>& nu)
{
    nu.assign(params.b.begin(), params.b.end());
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            acc += params.w_at(i, j) * m[j];
        nu[i] += acc;
    }
}

void type1_fields(const GrbmParams& params, const std::vector<double>& winv,
                  const std::vector<double>& nu, std::vector<double>& lambda)
{
    lambda.assign(params.c.begin(), params.c.end());
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        const double vi = nu[i];
        const double* row = &winv[i * params.n_hidden];
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            lambda[j] += row[j] * vi;
    }
}

void type2_fields(const MarginalBm& bm, const std::vector<double>& m, std::vector<double>& phi)
{
    const std::size_t H = bm.n_hidden;
    for (std::size_t j = 0; j < H; ++j) {
        double f = bm.B[j];
        const double* Jrow = &bm.J[j * H];
        for (std::size_t k = 0; k < H; ++k)
            f += Jrow[k] * m[k]; // diagonal is zero
        phi[j] = f;
    }
}

// Variational free energy of the whole-system scheme at the test
// distribution induced by m: Gaussians q_i = N(mu_i(m), sigma_i^2) and
// softmax factors u_j at fields lambda_j(nu). All u-dependent terms use the
// moments of u itself, so the value upper-bounds the true free energy for
// any m, converged or not.
double eval_type1(const GrbmParams& params, const std::vector<double>& winv,
                  const std::vector<double>& m, std::vector<double>* s_out,
                  std::vector<double>* nu_out)
{
    std::vector<double> nu, lambda;
    visible_means(params, m, nu);
    type1_fields(params, winv, nu, lambda);

    double f = 0.0;
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        const double d = nu[i] - params.b[i];
        f += 0.5 + 0.5 * d * d / params.sigma2[i] -
             0.5 * std::log(2.0 * kPi * std::exp(1.0) * params.sigma2[i]);
    }
    if (s_out)
        s_out->resize(params.n_hidden);
    for (std::size_t j = 0; j < params.n_hidden; ++j) {
        const HiddenUnitStats st = hidden_unit_stats(lambda[j], 0.0, params.space);
        // collapses -sum_i (w_ij/sigma_i^2) nu_i <h_j> - c_j <h_j>
        f += -lambda[j] * st.mean + st.neg_entropy;
        if (s_out)
            (*s_out)[j] = st.second_moment;
    }
    if (nu_out)
        *nu_out = std::move(nu);
    return f;
}

// Variational free energy of the marginalized scheme at the softmax factors
// induced by m through the fields B_j + sum_{k != j} J_jk m_k.
double eval_type2(const GrbmParams& params, const MarginalBm& bm, const std::vector<double>& m,
                  std::vector<double>* s_out)
{
    const std::size_t H = bm.n_hidden;
    std::vector<double> phi(H);
    type2_fields(bm, m, phi);

    std::vector<double> mean(H);
    double f = -bm.log_zH;
    if (s_out)
        s_out->resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        const HiddenUnitStats st = hidden_unit_stats(phi[j], bm.D[j], params.space);
        mean[j] = st.mean;
        f += -bm.B[j] * st.mean - bm.D[j] * st.second_moment + st.neg_entropy;
        if (s_out)
            (*s_out)[j] = st.second_moment;
    }
    for (std::size_t j = 0; j < H; ++j) {
        const double* Jrow = &bm.J[j * H];
        for (std::size_t k = j + 1; k < H; ++k)
            f -= Jrow[k] * mean[j] * mean[k];
    }
    return f;
}

// Damped synchronous successive substitution. `update` writes the undamped
// proposal for the current iterate; convergence is measured on the proposal
// before damping, so the returned m carries residual <= tol when converged.
struct IterationResult {
    bool converged = false;
    std::size_t iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
};

template <class Update>
IterationResult iterate_fixed_point(Update&& update, std::vector<double>& m,
                                    const SolverOptions& opts)
{
    const std::size_t H = m.size();
    std::vector<double> prop(H);
    IterationResult res;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        update(m, prop);
        double resid = 0.0;
        for (std::size_t j = 0; j < H; ++j)
            resid = std::max(resid, std::abs(prop[j] - m[j]));
        res.iterations = it;
        res.residual = resid;
        if (resid <= opts.tol) {
            res.converged = true;
            return res;
        }
        for (std::size_t j = 0; j < H; ++j)
            m[j] = opts.damping * m[j] + (1.0 - opts.damping) * prop[j];
    }
    // report the residual of the m actually returned
    update(m, prop);
    double resid = 0.0;
    for (std::size_t j = 0; j < H; ++j)
        resid = std::max(resid, std::abs(prop[j] - m[j]));
    res.residual = resid;
    return res;
}

std::vector<double> initial_means(std::size_t restart, std::size_t n_hidden,
                                  const SampleSpace& space, const SolverOptions& opts, Rng& rng)
{
    std::vector<double> m(n_hidden, 0.0);
    if (restart == 0)
        return m; // deterministic baseline start
    const double a = opts.init_scale * space.max_abs();
    for (double& mj : m)
        mj = std::clamp(rng.uniform(-a, a), space.min(), space.max());
    return m;
}

// Runs all restarts and keeps the converged run with the lowest free
// energy, falling back to the smallest-residual run when none converges.
template <class Update, class Finalize>
MfSolution best_of_restarts(MfVariant variant, std::size_t n_hidden, const SampleSpace& space,
                            const SolverOptions& opts, Update&& update, Finalize&& finalize)
{
    Rng rng(opts.seed);
    MfSolution best;
    bool have_best = false;
    for (std::size_t r = 0; r < opts.n_restarts; ++r) {
        std::vector<double> m = initial_means(r, n_hidden, space, opts, rng);
        const IterationResult it = iterate_fixed_point(update, m, opts);

        MfSolution cand;
        cand.variant = variant;
        cand.converged = it.converged;
        cand.iterations = it.iterations;
        cand.residual = it.residual;
        cand.m = std::move(m);
        finalize(cand);

        const bool better = !have_best ||
                            (cand.converged && !best.converged) ||
                            (cand.converged == best.converged &&
                             (cand.converged ? cand.free_energy < best.free_energy
                                             : cand.residual < best.residual));
        if (better) {
            best = std::move(cand);
            have_best = true;
        }
    }
    return best;
}

} // namespace

HiddenUnitStats hidden_unit_stats(double linear_field, double quad_field,
                                  const SampleSpace& space)
{
    const std::vector<double>& xs = space.values();
    const std::size_t K = xs.size();

    // max-shifted exponents; alphabets are tiny, so a small stack buffer
    // covers everything but exotic custom spaces
    std::array<double, 16> small;
    std::vector<double> large;
    double* tv = small.data();
    if (K > small.size()) {
        large.resize(K);
        tv = large.data();
    }

    double t_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
        tv[k] = linear_field * xs[k] + quad_field * xs[k] * xs[k];
        t_max = std::max(t_max, tv[k]);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        tv[k] = std::exp(tv[k] - t_max);
        z += tv[k];
    }
    HiddenUnitStats st;
    for (std::size_t k = 0; k < K; ++k) {
        const double u = tv[k] / z;
        st.mean += xs[k] * u;
        st.second_moment += xs[k] * xs[k] * u;
    }
    // sum_h u ln u via ln u(h) = lf*h + qf*h^2 - t_max - ln z and sum_h u = 1
    st.neg_entropy =
        linear_field * st.mean + quad_field * st.second_moment - t_max - std::log(z);
    return st;
}

MfSolution solve_type1(const GrbmParams& params, const SolverOptions& opts)
{
    check_options(opts);
    const std::vector<double> winv = scaled_couplings(params);

    std::vector<double> nu, lambda;
    auto update = [&](const std::vector<double>& m, std::vector<double>& prop) {
        visible_means(params, m, nu);
        type1_fields(params, winv, nu, lambda);
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            prop[j] = hidden_unit_stats(lambda[j], 0.0, params.space).mean;
    };
    auto finalize = [&](MfSolution& sol) {
        sol.free_energy = eval_type1(params, winv, sol.m, &sol.s, &sol.nu);
    };
    return best_of_restarts(MfVariant::TypeI, params.n_hidden, params.space, opts, update,
                            finalize);
}

MfSolution solve_type2(const GrbmParams& params, const SolverOptions& opts)
{
    check_options(opts);
    const MarginalBm bm = marginalize(params);
    const std::size_t H = bm.n_hidden;

    std::vector<double> phi(H);
    auto update = [&](const std::vector<double>& m, std::vector<double>& prop) {
        type2_fields(bm, m, phi);
        for (std::size_t j = 0; j < H; ++j)
            prop[j] = hidden_unit_stats(phi[j], bm.D[j], params.space).mean;
    };
    // whole-system substitution map in marginal coordinates: the field picks
    // up the self term 2 D_j m_j and the quadratic weight drops out. Its
    // fixed points sit in the deep basins of the marginal landscape, so each
    // restart also polishes a warm start taken from this map; without it the
    // plain iteration strands in shallow minima at strong couplings often
    // enough to break the free-energy ordering against the type I solution.
    auto self_coupled = [&](const std::vector<double>& m, std::vector<double>& prop) {
        type2_fields(bm, m, phi);
        for (std::size_t j = 0; j < H; ++j)
            prop[j] = hidden_unit_stats(phi[j] + 2.0 * bm.D[j] * m[j], 0.0, params.space).mean;
    };
    auto finalize = [&](MfSolution& sol) {
        sol.free_energy = eval_type2(params, bm, sol.m, &sol.s);
        visible_means(params, sol.m, sol.nu);
    };

    Rng rng(opts.seed);
    MfSolution best;
    bool have_best = false;
    auto consider = [&](MfSolution&& cand) {
        const bool better = !have_best ||
                            (cand.converged && !best.converged) ||
                            (cand.converged == best.converged &&
                             (cand.converged ? cand.free_energy < best.free_energy
                                             : cand.residual < best.residual));
        if (better) {
            best = std::move(cand);
            have_best = true;
        }
    };
    auto run_from = [&](std::vector<double> m) {
        const IterationResult it = iterate_fixed_point(update, m, opts);
        MfSolution cand;
        cand.variant = MfVariant::TypeII;
        cand.converged = it.converged;
        cand.iterations = it.iterations;
        cand.residual = it.residual;
        cand.m = std::move(m);
        finalize(cand);
        consider(std::move(cand));
    };

    for (std::size_t r = 0; r < opts.n_restarts; ++r) {
        const std::vector<double> m0 = initial_means(r, H, params.space, opts, rng);
        run_from(m0);
        std::vector<double> warm = m0;
        iterate_fixed_point(self_coupled, warm, opts);
        run_from(std::move(warm));
    }
    return best;
}

double free_energy_type1(const GrbmParams& params, const MfSolution& solution)
{
    check_solution(params, solution, MfVariant::TypeI);
    return eval_type1(params, scaled_couplings(params), solution.m, nullptr, nullptr);
}

double free_energy_type2(const GrbmParams& params, const MfSolution& solution)
{
    check_solution(params, solution, MfVariant::TypeII);
    return eval_type2(params, marginalize(params), solution.m, nullptr);
}

double kld_gap(double mf_free_energy, double true_free_energy)
{
    return mf_free_energy - true_free_energy;
}

} // namespace grbm
