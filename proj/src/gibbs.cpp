#include "grbm/gibbs.hpp"

#include <cmath>
#include <stdexcept>

#include "grbm/rng.hpp"

namespace grbm {

namespace {

// Batch-means standard error of the mean for one component, over nb batches
// of length len (n = nb * len samples in `sums`, pre-summed per batch).
double batch_se(const std::vector<double>& batch_means, double grand_mean)
{
    const std::size_t nb = batch_means.size();
    if (nb < 2)
        return 0.0;
    double ss = 0.0;
    for (double bm : batch_means) {
        const double d = bm - grand_mean;
        ss += d * d;
    }
    return std::sqrt(ss / (static_cast<double>(nb - 1) * static_cast<double>(nb)));
}

} // namespace

GibbsEstimate gibbs_estimate(const GrbmParams& params, std::size_t n_sweeps,
                             std::size_t n_burnin, std::uint64_t seed)
{
    if (n_sweeps == 0)
        throw std::invalid_argument("gibbs_estimate: n_sweeps must be positive");

    const std::size_t V = params.n_visible;
    const std::size_t H = params.n_hidden;
    const std::vector<double>& xs = params.space.values();
    const std::size_t K = xs.size();

    Rng rng(seed);

    // Only full batches enter both the estimate and its standard error.
    const std::size_t n_batches = std::min<std::size_t>(32, n_sweeps);
    const std::size_t batch_len = n_sweeps / n_batches;
    const std::size_t n_used = n_batches * batch_len;

    std::vector<double> h(H);
    for (std::size_t j = 0; j < H; ++j)
        h[j] = xs[rng.next_u64() % K];
    std::vector<double> v(V, 0.0);
    std::vector<double> sigma(V);
    for (std::size_t i = 0; i < V; ++i)
        sigma[i] = std::sqrt(params.sigma2[i]);

    std::vector<double> probs(K), shifted(K);
    auto sweep = [&]() {
        // visible layer jointly: independent Gaussians around mu_i(h)
        for (std::size_t i = 0; i < V; ++i) {
            double mu = params.b[i];
            for (std::size_t j = 0; j < H; ++j)
                mu += params.w_at(i, j) * h[j];
            v[i] = mu + sigma[i] * rng.normal();
        }
        // hidden layer jointly: softmax over the alphabet at fields lambda_j(v)
        std::vector<double> lambda(params.c.begin(), params.c.end());
        for (std::size_t i = 0; i < V; ++i) {
            const double vi = v[i] / params.sigma2[i];
            for (std::size_t j = 0; j < H; ++j)
                lambda[j] += params.w_at(i, j) * vi;
        }
        for (std::size_t j = 0; j < H; ++j) {
            double t_max = lambda[j] * xs[0];
            for (std::size_t k = 1; k < K; ++k)
                t_max = std::max(t_max, lambda[j] * xs[k]);
            double z = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                shifted[k] = std::exp(lambda[j] * xs[k] - t_max);
                z += shifted[k];
            }
            for (std::size_t k = 0; k < K; ++k)
                probs[k] = shifted[k] / z;
            h[j] = xs[rng.categorical(probs)];
        }
    };

    for (std::size_t t = 0; t < n_burnin; ++t)
        sweep();

    std::vector<double> h_sum(H, 0.0), v_sum(V, 0.0);
    std::vector<std::vector<double>> h_batch(H, std::vector<double>(n_batches, 0.0));
    std::vector<std::vector<double>> v_batch(V, std::vector<double>(n_batches, 0.0));
    for (std::size_t t = 0; t < n_used; ++t) {
        sweep();
        const std::size_t bidx = t / batch_len;
        for (std::size_t j = 0; j < H; ++j) {
            h_sum[j] += h[j];
            h_batch[j][bidx] += h[j];
        }
        for (std::size_t i = 0; i < V; ++i) {
            v_sum[i] += v[i];
            v_batch[i][bidx] += v[i];
        }
    }

    GibbsEstimate out;
    out.n_sweeps = n_used;
    out.m_hat.resize(H);
    out.std_err_m.resize(H);
    const double inv_len = 1.0 / static_cast<double>(batch_len);
    for (std::size_t j = 0; j < H; ++j) {
        out.m_hat[j] = h_sum[j] / static_cast<double>(n_used);
        for (double& bm : h_batch[j])
            bm *= inv_len;
        out.std_err_m[j] = batch_se(h_batch[j], out.m_hat[j]);
    }
    out.nu_hat.resize(V);
    out.std_err_nu.resize(V);
    for (std::size_t i = 0; i < V; ++i) {
        out.nu_hat[i] = v_sum[i] / static_cast<double>(n_used);
        for (double& bm : v_batch[i])
            bm *= inv_len;
        out.std_err_nu[i] = batch_se(v_batch[i], out.nu_hat[i]);
    }
    return out;
}

} // namespace grbm
