#pragma once

// Independent enumeration oracle for small instances. The hidden-state
// weight is obtained by integrating the joint Boltzmann factor over the
// visible layer in closed form (complete the square per visible unit),
// without ever forming the marginal B/D/J representation, and states are
// enumerated with plain nested recomputation: no shifting, no incremental
// deltas. Keep it naive; it exists to disagree with clever code.

#include <cmath>
#include <vector>

#include "grbm/model.hpp"

namespace brute {

struct Moments {
    std::vector<double> m;  // <h_j>
    std::vector<double> s;  // <h_j^2>
    std::vector<double> nu; // <v_i>
    double free_energy = 0.0;
    double log_z_marginal = 0.0;
};

// integral over v of exp(-E(v, h)); exact for any h
inline double marginal_weight(const grbm::GrbmParams& p, const std::vector<double>& h)
{
    double w = 1.0;
    for (std::size_t i = 0; i < p.n_visible; ++i) {
        double coupling = 0.0;
        for (std::size_t j = 0; j < p.n_hidden; ++j)
            coupling += p.w_at(i, j) * h[j];
        const double t = coupling / p.sigma2[i];
        w *= std::sqrt(2.0 * M_PI * p.sigma2[i]) *
             std::exp(t * p.b[i] + 0.5 * p.sigma2[i] * t * t);
    }
    double bias = 0.0;
    for (std::size_t j = 0; j < p.n_hidden; ++j)
        bias += p.c[j] * h[j];
    return w * std::exp(bias);
}

inline Moments moments(const grbm::GrbmParams& p)
{
    const std::vector<double>& xs = p.space.values();
    const std::size_t H = p.n_hidden;
    const std::size_t K = xs.size();

    std::vector<std::size_t> digit(H, 0);
    std::vector<double> h(H);
    Moments out;
    out.m.assign(H, 0.0);
    out.s.assign(H, 0.0);
    out.nu.assign(p.n_visible, 0.0);
    double z = 0.0;

    while (true) {
        for (std::size_t j = 0; j < H; ++j)
            h[j] = xs[digit[j]];
        const double w = marginal_weight(p, h);
        z += w;
        for (std::size_t j = 0; j < H; ++j) {
            out.m[j] += w * h[j];
            out.s[j] += w * h[j] * h[j];
        }
        // <v_i> through the conditional mean, the second route of the
        // visible-expectation identity
        for (std::size_t i = 0; i < p.n_visible; ++i) {
            double mu = p.b[i];
            for (std::size_t j = 0; j < H; ++j)
                mu += p.w_at(i, j) * h[j];
            out.nu[i] += w * mu;
        }
        std::size_t j = 0;
        while (j < H && ++digit[j] == K) {
            digit[j] = 0;
            ++j;
        }
        if (j == H)
            break;
    }

    for (std::size_t j = 0; j < H; ++j) {
        out.m[j] /= z;
        out.s[j] /= z;
    }
    for (std::size_t i = 0; i < p.n_visible; ++i)
        out.nu[i] /= z;
    out.free_energy = -std::log(z);
    double log_zH = 0.0;
    for (std::size_t i = 0; i < p.n_visible; ++i)
        log_zH += 0.5 * std::log(2.0 * M_PI * p.sigma2[i]);
    out.log_z_marginal = std::log(z) - log_zH;
    return out;
}

} // namespace brute
