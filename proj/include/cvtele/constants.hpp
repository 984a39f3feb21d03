#pragma once

namespace cvtele {

// CODATA 2018 values, SI units. eps0 and Z0 are derived from mu0 and c so the
// vacuum relations hold to rounding.
template <typename Real = double>
struct PhysicalConstants {
  static constexpr Real q = Real(1.602176634e-19);        // C
  static constexpr Real hbar = Real(1.054571817e-34);     // J s
  static constexpr Real k_B = Real(1.380649e-23);         // J / K
  static constexpr Real mu0 = Real(1.25663706212e-6);     // H / m
  static constexpr Real c = Real(299792458.0);            // m / s
  static constexpr Real eps0 = Real(1) / (mu0 * c * c);   // F / m
  static constexpr Real Z0 = mu0 * c;                     // Ohm
  static constexpr Real pi = Real(3.141592653589793238462643383279502884L);
};

using Constants = PhysicalConstants<double>;

}  // namespace cvtele
