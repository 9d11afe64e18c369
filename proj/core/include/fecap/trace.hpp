#ifndef FECAP_TRACE_HPP
#define FECAP_TRACE_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace fecap {

// Sampled time series of a simulation run.  The polarization column is the
// film polarization in the Landau coordinate (state written by negative
// voltage is positive).
struct TraceRecord {
    std::vector<double> t;      // [s]
    std::vector<double> v;      // applied voltage [V]
    std::vector<double> i;      // synthesized terminal current [A]
    std::vector<double> p;      // polarization [C/m^2]
    std::vector<double> e_app;  // [V/m]
    std::vector<double> e_dep;  // [V/m]
    std::vector<double> e_bias; // [V/m]
    std::vector<double> f_occ;  // trap occupancy fraction

    std::size_t size() const { return t.size(); }

    void append(double t_, double v_, double i_, double p_, double ea, double ed,
                double eb, double f);

    // Sub-range copy [begin, end).
    TraceRecord slice(std::size_t begin, std::size_t end) const;

    // CSV with header t_s,V_V,I_A,P_C_per_m2,E_app_V_per_m,E_dep_V_per_m,
    // E_bias_V_per_m,f_occ
    void write_csv(std::ostream& os) const;
};

} // namespace fecap

#endif
