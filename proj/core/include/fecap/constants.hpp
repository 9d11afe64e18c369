#ifndef FECAP_CONSTANTS_HPP
#define FECAP_CONSTANTS_HPP

namespace fecap {

inline constexpr double eps0 = 8.8541878128e-12; // vacuum permittivity [F/m]
inline constexpr double q_e  = 1.602176634e-19;  // elementary charge [C]

} // namespace fecap

#endif
