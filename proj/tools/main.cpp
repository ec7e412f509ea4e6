// Command-line harness: parameter sweeps, single-instance inspection,
// invariant check suites and a Gibbs-vs-enumeration cross check.
//
// Exit codes: 0 success, 1 invariant violation, 2 usage error, 3 capacity
// error (enumeration above the state cap).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grbm/exact.hpp"
#include "grbm/experiments.hpp"
#include "grbm/gibbs.hpp"
#include "grbm/meanfield.hpp"
#include "grbm/model.hpp"
#include "grbm/rng.hpp"
#include "grbm/table_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

grbm::SampleSpace parse_space(const std::string& text)
{
    if (text == "binary")
        return grbm::SampleSpace::binary();
    if (text == "ternary")
        return grbm::SampleSpace::ternary();
    if (text.rfind("custom:", 0) == 0) {
        std::vector<double> values;
        std::stringstream ss(text.substr(7));
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size())
                throw CLI::ValidationError("--space", "bad value '" + item + "'");
            values.push_back(v);
        }
        return grbm::SampleSpace(values);
    }
    throw CLI::ValidationError("--space", "expected binary, ternary or custom:v1,v2,...");
}

struct CommonFlags {
    std::string space_text = "binary";
    std::size_t n_visible = 24;
    std::size_t n_hidden = 12;
    double sigma2 = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t state_cap = grbm::kDefaultStateCap;
    grbm::SolverOptions solver;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--space", space_text, "binary, ternary or custom:v1,v2,...");
        cmd->add_option("--n-visible", n_visible, "visible layer size");
        cmd->add_option("--n-hidden", n_hidden, "hidden layer size");
        cmd->add_option("--sigma2", sigma2, "shared visible variance");
        cmd->add_option("--seed", seed, "base RNG seed");
        cmd->add_option("--state-cap", state_cap, "enumeration state cap");
        cmd->add_option("--damping", solver.damping, "fraction of old iterate retained");
        cmd->add_option("--tol", solver.tol, "max-abs convergence threshold on m");
        cmd->add_option("--max-iter", solver.max_iter, "iteration cap per restart");
        cmd->add_option("--restarts", solver.n_restarts, "number of solver restarts");
        cmd->add_option("--init-scale", solver.init_scale, "random init range factor");
    }
};

std::size_t threads_from_env()
{
    if (const char* env = std::getenv("GRBM_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0)
            return static_cast<std::size_t>(n);
    }
    return 0; // let the library pick hardware concurrency
}

int cmd_sweep(const CommonFlags& common, const std::string& mode_text,
              const std::string& vary_text, const std::vector<double>& sd_grid, double fixed_sd,
              std::size_t trials, bool strict, const std::string& out_path,
              const std::string& format)
{
    grbm::SweepSpec spec;
    if (mode_text == "free-energy")
        spec.mode = grbm::SweepMode::FreeEnergy;
    else if (mode_text == "mse")
        spec.mode = grbm::SweepMode::Mse;
    else
        throw CLI::ValidationError("--mode", "expected free-energy or mse");
    if (vary_text == "w")
        spec.vary = grbm::VaryParam::W;
    else if (vary_text == "b")
        spec.vary = grbm::VaryParam::B;
    else if (vary_text == "c")
        spec.vary = grbm::VaryParam::C;
    else
        throw CLI::ValidationError("--vary", "expected w, b or c");
    if (!sd_grid.empty())
        spec.sd_grid = sd_grid;
    spec.fixed_sd = fixed_sd;
    spec.n_visible = common.n_visible;
    spec.n_hidden = common.n_hidden;
    spec.space = parse_space(common.space_text);
    spec.trials = trials;
    spec.sigma2_value = common.sigma2;
    spec.solver = common.solver;
    spec.seed = common.seed;
    spec.strict = strict;
    spec.state_cap = common.state_cap;
    spec.n_threads = threads_from_env();

    const char delim = format == "tsv" ? '\t' : ',';
    const std::vector<grbm::SweepRow> rows = grbm::run_sweep(spec);
    if (out_path.empty() || out_path == "-") {
        grbm::write_sweep_table(std::cout, spec.mode, rows, delim);
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) {
            std::cerr << "error: cannot open output file " << out_path << '\n';
            return kExitUsage;
        }
        grbm::write_sweep_table(os, spec.mode, rows, delim);
    }
    return kExitOk;
}

void print_vector(std::ostream& os, const char* name, const std::vector<double>& xs)
{
    os << "  " << name << " = [";
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << (i ? ", " : "") << grbm::format_double(xs[i]);
    os << "]\n";
}

int cmd_inspect(const CommonFlags& common, double sd_b, double sd_c, double sd_w)
{
    const grbm::SampleSpace space = parse_space(common.space_text);
    const grbm::GrbmParams params =
        grbm::sample_params(common.n_visible, common.n_hidden, sd_b, sd_c, sd_w, common.sigma2,
                            space, common.seed);
    const grbm::MarginalBm bm = grbm::marginalize(params);
    const grbm::TrialResult tr = grbm::run_trial(params, common.solver, common.state_cap);

    std::ostream& os = std::cout;
    os << "instance seed=" << common.seed << " |V|=" << params.n_visible
       << " |H|=" << params.n_hidden << "\n";
    os << "theta:\n";
    print_vector(os, "b", params.b);
    print_vector(os, "c", params.c);
    os << "  w (row-major " << params.n_visible << "x" << params.n_hidden << "):\n";
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        os << "   ";
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            os << ' ' << grbm::format_double(params.w_at(i, j));
        os << '\n';
    }
    print_vector(os, "sigma2", params.sigma2);
    os << "marginal Boltzmann machine:\n";
    print_vector(os, "B", bm.B);
    print_vector(os, "D", bm.D);
    os << "  J (upper triangle):\n";
    for (std::size_t j = 0; j < bm.n_hidden; ++j) {
        os << "   ";
        for (std::size_t k = j + 1; k < bm.n_hidden; ++k)
            os << ' ' << grbm::format_double(bm.J_at(j, k));
        os << '\n';
    }
    os << "  log_zH = " << grbm::format_double(bm.log_zH) << "\n";

    os << "results:\n";
    os << "  F_exact = " << grbm::format_double(tr.exact.free_energy)
       << "  F1 = " << grbm::format_double(tr.type1.free_energy)
       << "  F2 = " << grbm::format_double(tr.type2.free_energy) << "\n";
    os << "  kld_gap1 = "
       << grbm::format_double(grbm::kld_gap(tr.type1.free_energy, tr.exact.free_energy))
       << "  kld_gap2 = "
       << grbm::format_double(grbm::kld_gap(tr.type2.free_energy, tr.exact.free_energy)) << "\n";
    os << "  type I : converged=" << (tr.type1.converged ? "yes" : "no")
       << " iters=" << tr.type1.iterations << " residual="
       << grbm::format_double(tr.type1.residual) << "\n";
    os << "  type II: converged=" << (tr.type2.converged ? "yes" : "no")
       << " iters=" << tr.type2.iterations << " residual="
       << grbm::format_double(tr.type2.residual) << "\n";
    os << "  unit   exact<h>        m1              m2\n";
    for (std::size_t j = 0; j < params.n_hidden; ++j)
        os << "  h" << j << "  " << grbm::format_double(tr.exact.m_exact[j]) << "  "
           << grbm::format_double(tr.type1.m[j]) << "  " << grbm::format_double(tr.type2.m[j])
           << "\n";
    os << "  unit   exact<v>        nu1             nu2\n";
    for (std::size_t i = 0; i < params.n_visible; ++i)
        os << "  v" << i << "  " << grbm::format_double(tr.exact.nu_exact[i]) << "  "
           << grbm::format_double(tr.type1.nu[i]) << "  " << grbm::format_double(tr.type2.nu[i])
           << "\n";
    return kExitOk;
}

int cmd_check(const CommonFlags& common, std::size_t instances, double sd_b, double sd_c,
              double sd_w)
{
    const grbm::SampleSpace space = parse_space(common.space_text);
    const double slack = 1e-9;
    const double exact_tol = 1e-12;
    bool ok = true;

    // Free-energy bound chain and KLD ordering on random instances.
    std::size_t n_ordered = 0, n_converged = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::uint64_t seed = grbm::splitmix64(common.seed ^ (0x517CC1B727220A95ull * (i + 1)));
        const grbm::GrbmParams params = grbm::sample_params(
            common.n_visible, common.n_hidden, sd_b, sd_c, sd_w, common.sigma2, space, seed);
        grbm::SolverOptions solver = common.solver;
        solver.seed = seed;
        const grbm::TrialResult tr = grbm::run_trial(params, solver, common.state_cap);
        if (!(tr.type1.converged && tr.type2.converged))
            continue;
        ++n_converged;
        const double f = tr.exact.free_energy;
        const double f1 = tr.type1.free_energy;
        const double f2 = tr.type2.free_energy;
        const bool chain = f1 >= f2 - slack && f2 >= f - slack;
        const bool kld = grbm::kld_gap(f1, f) >= grbm::kld_gap(f2, f) - slack;
        if (chain && kld)
            ++n_ordered;
        else
            ok = false;
    }
    std::cout << n_ordered << "/" << n_converged << " instances: F1 >= F2 >= F"
              << (n_converged < instances
                      ? " (" + std::to_string(instances - n_converged) + " unconverged skipped)"
                      : "")
              << "\n";

    // Exactness at w = 0: both schemes must reproduce the factorized model.
    grbm::SolverOptions tight = common.solver;
    tight.tol = 1e-13;
    const std::size_t n_exact = std::min<std::size_t>(instances, 100);
    std::size_t n_w0 = 0;
    for (std::size_t i = 0; i < n_exact; ++i) {
        const std::uint64_t seed = grbm::splitmix64(common.seed ^ (0x2545F4914F6CDD1Dull * (i + 1)));
        const grbm::GrbmParams params = grbm::sample_params(
            common.n_visible, common.n_hidden, sd_b, sd_c, 0.0, common.sigma2, space, seed);
        grbm::SolverOptions solver = tight;
        solver.seed = seed;
        const grbm::TrialResult tr = grbm::run_trial(params, solver, common.state_cap);
        const double f = tr.exact.free_energy;
        if (std::abs(tr.type1.free_energy - f) <= exact_tol &&
            std::abs(tr.type2.free_energy - f) <= exact_tol)
            ++n_w0;
        else
            ok = false;
    }
    std::cout << n_w0 << "/" << n_exact << " instances: w=0 exactness (|F1-F|, |F2-F| <= 1e-12)\n";

    // Exactness at |H| = 1: type II solves the marginal exactly.
    std::size_t n_h1 = 0;
    for (std::size_t i = 0; i < n_exact; ++i) {
        const std::uint64_t seed = grbm::splitmix64(common.seed ^ (0x9E6C63D0876A9F4Bull * (i + 1)));
        const grbm::GrbmParams params = grbm::sample_params(common.n_visible, 1, sd_b, sd_c, sd_w,
                                                            common.sigma2, space, seed);
        grbm::SolverOptions solver = tight;
        solver.seed = seed;
        const grbm::TrialResult tr = grbm::run_trial(params, solver, common.state_cap);
        if (std::abs(tr.type2.free_energy - tr.exact.free_energy) <= exact_tol &&
            std::abs(tr.type2.m[0] - tr.exact.m_exact[0]) <= exact_tol)
            ++n_h1;
        else
            ok = false;
    }
    std::cout << n_h1 << "/" << n_exact << " instances: |H|=1 type II exactness\n";

    if (!ok)
        std::cerr << "error: invariant violation detected\n";
    return ok ? kExitOk : kExitViolation;
}

int cmd_gibbs_check(const CommonFlags& common, std::size_t sweeps, std::size_t burnin,
                    std::size_t reps, double sd_b, double sd_c, double sd_w)
{
    const grbm::SampleSpace space = parse_space(common.space_text);
    const grbm::GrbmParams params = grbm::sample_params(
        common.n_visible, common.n_hidden, sd_b, sd_c, sd_w, common.sigma2, space, common.seed);
    const grbm::ExactMoments ex = grbm::exact_moments(params, common.state_cap);

    std::size_t within = 0, total = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const grbm::GibbsEstimate g = grbm::gibbs_estimate(
            params, sweeps, burnin, grbm::splitmix64(common.seed ^ (0xDA3E39CB94B95BDBull * (r + 1))));
        for (std::size_t j = 0; j < params.n_hidden; ++j, ++total)
            if (std::abs(g.m_hat[j] - ex.m_exact[j]) <= 3.0 * g.std_err_m[j])
                ++within;
        for (std::size_t i = 0; i < params.n_visible; ++i, ++total)
            if (std::abs(g.nu_hat[i] - ex.nu_exact[i]) <= 3.0 * g.std_err_nu[i])
                ++within;
    }
    const double frac = static_cast<double>(within) / static_cast<double>(total);
    std::cout << within << "/" << total
              << " components within 3 standard errors of the exact moments\n";
    if (frac < 0.95) {
        std::cerr << "error: sampler check failed (fraction " << frac << " < 0.95)\n";
        return kExitViolation;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gaussian RBM mean-field inference harness"};
    app.require_subcommand(1);

    CommonFlags common;

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a parameter-SD sweep and emit a table");
    std::string mode_text = "free-energy";
    std::string vary_text;
    std::vector<double> sd_grid;
    double fixed_sd = 0.1;
    std::size_t trials = 1000;
    bool strict = false;
    std::string out_path = "-";
    std::string format = "csv";
    sweep->add_option("--mode", mode_text, "free-energy or mse");
    sweep->add_option("--vary", vary_text, "swept parameter family: w, b or c")->required();
    sweep->add_option("--sd-grid", sd_grid, "comma-separated SD grid")->delimiter(',');
    sweep->add_option("--fixed-sd", fixed_sd, "SD of the non-swept families");
    sweep->add_option("--trials", trials, "instances per sweep point");
    sweep->add_flag("--strict", strict, "exclude unconverged trials from averages");
    sweep->add_option("--out", out_path, "output path, - for stdout");
    sweep->add_option("--format", format, "csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}));
    common.attach(sweep);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "print one instance and all inference results");
    double sd_b = 0.1, sd_c = 0.1, sd_w = 0.1;
    inspect->add_option("--sd-b", sd_b, "SD of visible biases");
    inspect->add_option("--sd-c", sd_c, "SD of hidden biases");
    inspect->add_option("--sd-w", sd_w, "SD of couplings");
    common.attach(inspect);

    // check
    auto* check = app.add_subcommand("check", "run the invariant suite over random instances");
    std::size_t instances = 500;
    double ck_sd_b = 0.1, ck_sd_c = 0.1, ck_sd_w = 0.1;
    check->add_option("--instances", instances, "number of random instances");
    check->add_option("--sd-b", ck_sd_b, "SD of visible biases");
    check->add_option("--sd-c", ck_sd_c, "SD of hidden biases");
    check->add_option("--sd-w", ck_sd_w, "SD of couplings");
    common.attach(check);

    // gibbs-check
    auto* gibbs = app.add_subcommand("gibbs-check", "compare the Gibbs sampler to enumeration");
    std::size_t sweeps = 100000, burnin = 2000, reps = 5;
    double gb_sd_b = 0.1, gb_sd_c = 0.1, gb_sd_w = 0.3;
    gibbs->add_option("--sweeps", sweeps, "post-burn-in sweeps");
    gibbs->add_option("--burnin", burnin, "burn-in sweeps");
    gibbs->add_option("--reps", reps, "independent repetitions");
    gibbs->add_option("--sd-b", gb_sd_b, "SD of visible biases");
    gibbs->add_option("--sd-c", gb_sd_c, "SD of hidden biases");
    gibbs->add_option("--sd-w", gb_sd_w, "SD of couplings");
    common.attach(gibbs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sweep->parsed())
            return cmd_sweep(common, mode_text, vary_text, sd_grid, fixed_sd, trials, strict,
                             out_path, format);
        if (inspect->parsed())
            return cmd_inspect(common, sd_b, sd_c, sd_w);
        if (check->parsed())
            return cmd_check(common, instances, ck_sd_b, ck_sd_c, ck_sd_w);
        if (gibbs->parsed())
            return cmd_gibbs_check(common, sweeps, burnin, reps, gb_sd_b, gb_sd_c, gb_sd_w);
    } catch (const grbm::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
