#include "grbm/model.hpp"

#include <cmath>
#include <stdexcept>

#include "grbm/rng.hpp"

namespace grbm {

namespace {

void require(bool cond, const char* msg)
{
    if (!cond)
        throw std::invalid_argument(msg);
}

void require_all_finite(std::span<const double> xs, const char* msg)
{
    for (double x : xs)
        require(std::isfinite(x), msg);
}

} // namespace

GrbmParams::GrbmParams(std::size_t n_visible_, std::size_t n_hidden_, std::vector<double> b_,
                       std::vector<double> c_, std::vector<double> w_,
                       std::vector<double> sigma2_, SampleSpace space_)
    : n_visible(n_visible_),
      n_hidden(n_hidden_),
      b(std::move(b_)),
      c(std::move(c_)),
      w(std::move(w_)),
      sigma2(std::move(sigma2_)),
      space(std::move(space_))
{
    require(n_visible > 0, "GrbmParams: n_visible must be positive");
    require(n_hidden > 0, "GrbmParams: n_hidden must be positive");
    require(b.size() == n_visible, "GrbmParams: b has wrong length");
    require(c.size() == n_hidden, "GrbmParams: c has wrong length");
    require(w.size() == n_visible * n_hidden, "GrbmParams: w has wrong shape");
    require(sigma2.size() == n_visible, "GrbmParams: sigma2 has wrong length");
    require_all_finite(b, "GrbmParams: non-finite entry in b");
    require_all_finite(c, "GrbmParams: non-finite entry in c");
    require_all_finite(w, "GrbmParams: non-finite entry in w");
    for (double s2 : sigma2)
        require(std::isfinite(s2) && s2 > 0.0, "GrbmParams: sigma2 entries must be positive");
}

double energy(std::span<const double> v, std::span<const double> h, const GrbmParams& params)
{
    require(v.size() == params.n_visible, "energy: v has wrong length");
    require(h.size() == params.n_hidden, "energy: h has wrong length");
    for (double hj : h)
        require(params.space.contains(hj), "energy: h value outside sample space");

    double quad = 0.0;
    double bilinear = 0.0;
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        const double d = v[i] - params.b[i];
        quad += 0.5 * d * d / params.sigma2[i];
        double row = 0.0;
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            row += params.w_at(i, j) * h[j];
        bilinear += v[i] * row / params.sigma2[i];
    }
    double linear = 0.0;
    for (std::size_t j = 0; j < params.n_hidden; ++j)
        linear += params.c[j] * h[j];
    return quad - bilinear - linear;
}

std::vector<double> visible_mean_given_hidden(const GrbmParams& params, std::span<const double> h)
{
    require(h.size() == params.n_hidden, "visible_mean_given_hidden: h has wrong length");
    for (double hj : h)
        require(params.space.contains(hj),
                "visible_mean_given_hidden: h value outside sample space");

    std::vector<double> mu(params.n_visible);
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        double acc = params.b[i];
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            acc += params.w_at(i, j) * h[j];
        mu[i] = acc;
    }
    return mu;
}

std::vector<double> hidden_field_given_visible(const GrbmParams& params, std::span<const double> v)
{
    require(v.size() == params.n_visible, "hidden_field_given_visible: v has wrong length");
    require_all_finite(v, "hidden_field_given_visible: non-finite v");

    std::vector<double> lambda(params.c.begin(), params.c.end());
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        const double vi = v[i] / params.sigma2[i];
        for (std::size_t j = 0; j < params.n_hidden; ++j)
            lambda[j] += params.w_at(i, j) * vi;
    }
    return lambda;
}

MarginalBm marginalize(const GrbmParams& params)
{
    const std::size_t H = params.n_hidden;
    MarginalBm bm;
    bm.n_hidden = H;
    bm.B.assign(params.c.begin(), params.c.end());
    bm.D.assign(H, 0.0);
    bm.J.assign(H * H, 0.0);
    bm.log_zH = 0.0;

    for (std::size_t i = 0; i < params.n_visible; ++i) {
        const double inv_s2 = 1.0 / params.sigma2[i];
        const double* wrow = &params.w[i * H];
        for (std::size_t j = 0; j < H; ++j) {
            bm.B[j] += params.b[i] * inv_s2 * wrow[j];
            bm.D[j] += 0.5 * wrow[j] * wrow[j] * inv_s2;
            for (std::size_t k = j + 1; k < H; ++k)
                bm.J[j * H + k] += wrow[j] * wrow[k] * inv_s2;
        }
        bm.log_zH += 0.5 * std::log(2.0 * 3.14159265358979323846 * params.sigma2[i]);
    }
    // mirror the upper triangle
    for (std::size_t j = 0; j < H; ++j)
        for (std::size_t k = j + 1; k < H; ++k)
            bm.J[k * H + j] = bm.J[j * H + k];
    return bm;
}

GrbmParams sample_params(std::size_t n_visible, std::size_t n_hidden, double sd_b, double sd_c,
                         double sd_w, double sigma2_value, const SampleSpace& space,
                         std::uint64_t seed)
{
    require(sd_b >= 0.0 && sd_c >= 0.0 && sd_w >= 0.0,
            "sample_params: standard deviations must be nonnegative");
    require(std::isfinite(sigma2_value) && sigma2_value > 0.0,
            "sample_params: sigma2_value must be positive");

    Rng rng(seed);
    std::vector<double> b(n_visible), c(n_hidden), w(n_visible * n_hidden);
    for (double& x : b)
        x = sd_b * rng.normal();
    for (double& x : c)
        x = sd_c * rng.normal();
    for (double& x : w)
        x = sd_w * rng.normal();
    std::vector<double> sigma2(n_visible, sigma2_value);
    return GrbmParams(n_visible, n_hidden, std::move(b), std::move(c), std::move(w),
                      std::move(sigma2), space);
}

} // namespace grbm
