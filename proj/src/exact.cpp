#include "grbm/exact.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace grbm {

namespace {

std::uint64_t checked_state_count(std::size_t alphabet, std::size_t n_hidden,
                                  std::uint64_t state_cap)
{
    std::uint64_t n = 1;
    for (std::size_t j = 0; j < n_hidden; ++j) {
        if (n > state_cap / alphabet)
            throw CapacityError("enumeration state space exceeds cap of " +
                                std::to_string(state_cap) + " states");
        n *= alphabet;
    }
    if (n > state_cap)
        throw CapacityError("enumeration state space exceeds cap of " +
                            std::to_string(state_cap) + " states");
    return n;
}

// Kahan-compensated accumulator; the ternary sweeps sum ~10^5 weights and
// the exactness tests want agreement near 1e-14.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x)
    {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Walks all |X|^|H| hidden configurations as a mixed-radix counter with the
// first index fastest. The exponent S(h) = B.h + D.h^2 + sum_{j<k} J h_j h_k
// and the cached local fields f_j = sum_{k != j} J_jk h_k are updated by
// single-site deltas, so one state costs O(|H|) amortized instead of O(|H|^2).
template <class Visit>
void for_each_state(const MarginalBm& bm, const SampleSpace& space, std::uint64_t n_states,
                    Visit&& visit)
{
    const std::size_t H = bm.n_hidden;
    const std::vector<double>& xs = space.values();
    const std::size_t K = xs.size();

    std::vector<std::size_t> digit(H, 0);
    std::vector<double> h(H, xs[0]);
    std::vector<double> field(H, 0.0); // f_j = sum_{k != j} J_jk h_k

    double S = 0.0;
    for (std::size_t j = 0; j < H; ++j) {
        S += bm.B[j] * h[j] + bm.D[j] * h[j] * h[j];
        double f = 0.0;
        for (std::size_t k = 0; k < H; ++k)
            f += bm.J[j * H + k] * h[k]; // diagonal is zero
        field[j] = f;
        for (std::size_t k = j + 1; k < H; ++k)
            S += bm.J[j * H + k] * h[j] * h[k];
    }

    auto set_site = [&](std::size_t j, double next) {
        const double prev = h[j];
        const double d = next - prev;
        S += bm.B[j] * d + bm.D[j] * (next * next - prev * prev) + d * field[j];
        const double* Jrow = &bm.J[j * H];
        for (std::size_t k = 0; k < H; ++k)
            field[k] += Jrow[k] * d;
        h[j] = next;
    };

    for (std::uint64_t state = 0;; ++state) {
        visit(S, h);
        if (state + 1 == n_states)
            break;
        std::size_t j = 0;
        while (true) {
            if (++digit[j] < K) {
                set_site(j, xs[digit[j]]);
                break;
            }
            digit[j] = 0;
            set_site(j, xs[0]);
            ++j;
        }
    }
}

double max_exponent(const MarginalBm& bm, const SampleSpace& space, std::uint64_t n_states)
{
    double s_max = -std::numeric_limits<double>::infinity();
    for_each_state(bm, space, n_states, [&](double S, const std::vector<double>&) {
        if (S > s_max)
            s_max = S;
    });
    return s_max;
}

} // namespace

double exact_free_energy(const GrbmParams& params, std::uint64_t state_cap)
{
    const std::uint64_t n_states =
        checked_state_count(params.space.size(), params.n_hidden, state_cap);
    const MarginalBm bm = marginalize(params);

    const double s_max = max_exponent(bm, params.space, n_states);
    Kahan wsum;
    for_each_state(bm, params.space, n_states,
                   [&](double S, const std::vector<double>&) { wsum.add(std::exp(S - s_max)); });
    const double log_z_marginal = s_max + std::log(wsum.sum);
    return -bm.log_zH - log_z_marginal;
}

ExactMoments exact_moments(const GrbmParams& params, std::uint64_t state_cap)
{
    const std::uint64_t n_states =
        checked_state_count(params.space.size(), params.n_hidden, state_cap);
    const MarginalBm bm = marginalize(params);
    const std::size_t H = params.n_hidden;

    const double s_max = max_exponent(bm, params.space, n_states);
    Kahan wsum;
    std::vector<Kahan> msum(H), ssum(H);
    for_each_state(bm, params.space, n_states, [&](double S, const std::vector<double>& h) {
        const double e = std::exp(S - s_max);
        wsum.add(e);
        for (std::size_t j = 0; j < H; ++j) {
            msum[j].add(e * h[j]);
            ssum[j].add(e * h[j] * h[j]);
        }
    });

    ExactMoments out;
    out.m_exact.resize(H);
    out.s_exact.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        out.m_exact[j] = msum[j].sum / wsum.sum;
        out.s_exact[j] = ssum[j].sum / wsum.sum;
    }
    out.nu_exact.resize(params.n_visible);
    for (std::size_t i = 0; i < params.n_visible; ++i) {
        double acc = params.b[i];
        for (std::size_t j = 0; j < H; ++j)
            acc += params.w_at(i, j) * out.m_exact[j];
        out.nu_exact[i] = acc;
    }
    out.log_z_marginal = s_max + std::log(wsum.sum);
    out.free_energy = -bm.log_zH - out.log_z_marginal;
    return out;
}

} // namespace grbm
