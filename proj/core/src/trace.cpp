#include "fecap/trace.hpp"

#include <ostream>

#include "fecap/csv.hpp"

namespace fecap {

void TraceRecord::append(double t_, double v_, double i_, double p_, double ea,
                         double ed, double eb, double f) {
    t.push_back(t_);
    v.push_back(v_);
    i.push_back(i_);
    p.push_back(p_);
    e_app.push_back(ea);
    e_dep.push_back(ed);
    e_bias.push_back(eb);
    f_occ.push_back(f);
}

TraceRecord TraceRecord::slice(std::size_t begin, std::size_t end) const {
    TraceRecord out;
    auto cut = [&](const std::vector<double>& src, std::vector<double>& dst) {
        dst.assign(src.begin() + begin, src.begin() + end);
    };
    cut(t, out.t);
    cut(v, out.v);
    cut(i, out.i);
    cut(p, out.p);
    cut(e_app, out.e_app);
    cut(e_dep, out.e_dep);
    cut(e_bias, out.e_bias);
    cut(f_occ, out.f_occ);
    return out;
}

void TraceRecord::write_csv(std::ostream& os) const {
    os << "t_s,V_V,I_A,P_C_per_m2,E_app_V_per_m,E_dep_V_per_m,"
          "E_bias_V_per_m,f_occ\n";
    for (std::size_t k = 0; k < size(); ++k) {
        csv::write_value(os, t[k]);
        os << ',';
        csv::write_value(os, v[k]);
        os << ',';
        csv::write_value(os, i[k]);
        os << ',';
        csv::write_value(os, p[k]);
        os << ',';
        csv::write_value(os, e_app[k]);
        os << ',';
        csv::write_value(os, e_dep[k]);
        os << ',';
        csv::write_value(os, e_bias[k]);
        os << ',';
        csv::write_value(os, f_occ[k]);
        os << '\n';
    }
}

} // namespace fecap
