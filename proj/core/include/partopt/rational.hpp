#ifndef PARTOPT_RATIONAL_HPP
#define PARTOPT_RATIONAL_HPP

#include <gmpxx.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace partopt::num {

// scalar abstraction so the simplex/LU code instantiates for plain doubles
// (fast, tolerance-based) and mpq_class (exact, zero tolerances).

template <class S>
inline constexpr bool is_exact = false;
template <>
inline constexpr bool is_exact<mpq_class> = true;

inline double to_double(double v) { return v; }
inline double to_double(const mpq_class& v) { return v.get_d(); }

// conversion from double is exact in both directions we care about:
// mpq_set_d represents the dyadic rational exactly.
template <class S>
S from_double(double v);
template <>
inline double from_double<double>(double v) {
  return v;
}
template <>
inline mpq_class from_double<mpq_class>(double v) {
  return mpq_class(v);
}

inline double abs_val(double v) { return std::fabs(v); }
inline mpq_class abs_val(const mpq_class& v) { return abs(v); }

inline int sign(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }
inline int sign(const mpq_class& v) { return sgn(v); }

// rough magnitude used only to prefer small pivots in exact LU
inline double entry_size(double v) { return std::fabs(v); }
inline double entry_size(const mpq_class& v) {
  return static_cast<double>(mpz_size(v.get_num_mpz_t()) + mpz_size(v.get_den_mpz_t()));
}

inline std::string to_string(double v) { return std::to_string(v); }
inline std::string to_string(const mpq_class& v) { return v.get_str(); }

}  // namespace partopt::num

#endif
