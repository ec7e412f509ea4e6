#include "grbm/table_io.hpp"

#include <charconv>
#include <system_error>

namespace grbm {

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_sweep_table(std::ostream& os, SweepMode mode, const std::vector<SweepRow>& rows,
                       char delim)
{
    if (mode == SweepMode::FreeEnergy) {
        os << "sd" << delim << "f_exact_mean" << delim << "f1_mean" << delim << "f2_mean"
           << delim << "n_unconverged" << delim << "n_trials" << '\n';
        for (const SweepRow& r : rows) {
            os << format_double(r.sd) << delim << format_double(r.f_exact_mean) << delim
               << format_double(r.f1_mean) << delim << format_double(r.f2_mean) << delim
               << r.n_unconverged << delim << r.n_trials << '\n';
        }
    } else {
        os << "sd" << delim << "mse1_h" << delim << "mse1_v" << delim << "mse2_h" << delim
           << "mse2_v" << delim << "n_unconverged" << delim << "n_trials" << '\n';
        for (const SweepRow& r : rows) {
            os << format_double(r.sd) << delim << format_double(r.mse1_h) << delim
               << format_double(r.mse1_v) << delim << format_double(r.mse2_h) << delim
               << format_double(r.mse2_v) << delim << r.n_unconverged << delim << r.n_trials
               << '\n';
        }
    }
}

} // namespace grbm
