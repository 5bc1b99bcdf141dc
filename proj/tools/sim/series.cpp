#include "series.hpp"

#include <cstdio>

namespace ivpb::cli {

void write_series_header(std::ostream& out) {
    out << "# ivpb-series v" << kSeriesVersion << '\n';
    for (std::size_t i = 0; i < kSeriesColumns.size(); ++i) out << (i ? "," : "") << kSeriesColumns[i];
    out << '\n';
}

void write_series_row(std::ostream& out, const EnergyReport& r) {
    const double vals[12] = {r.t,
                             r.triple_norm_sq,
                             r.triple_norm_nu_sq,
                             r.e_functional,
                             r.y_lyapunov,
                             r.cons.mass,
                             r.cons.momentum[0],
                             r.cons.momentum[1],
                             r.cons.momentum[2],
                             r.cons.energy,
                             r.cons.neutrality,
                             r.min_F};
    char buf[32];
    for (double v : vals) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << ',';
    }
    out << r.newton_iters << '\n';
}

}  // namespace ivpb::cli
