#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grbm/model.hpp"

namespace grbm {

/// Thrown when an exhaustive enumeration would exceed the state cap.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Default bound on |X|^|H| for exhaustive enumeration.
inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 24;

/// Enumeration oracle output: exact hidden moments, exact visible means and
/// the true free energy F = -ln Z.
struct ExactMoments {
    std::vector<double> m_exact;  // <h_j>
    std::vector<double> s_exact;  // <h_j^2>
    std::vector<double> nu_exact; // <v_i>
    double free_energy = 0.0;
    double log_z_marginal = 0.0; // ln sum_h exp(B.h + D.h^2 + sum_{j<k} J h h)
};

/// True free energy by exhaustive enumeration of the marginal hidden-layer
/// Boltzmann machine, with max-shifted accumulation.
double exact_free_energy(const GrbmParams& params, std::uint64_t state_cap = kDefaultStateCap);

/// Exact moments by the same enumeration; visible means follow from the
/// identity <v_i> = b_i + sum_j w_ij <h_j>.
ExactMoments exact_moments(const GrbmParams& params, std::uint64_t state_cap = kDefaultStateCap);

} // namespace grbm
