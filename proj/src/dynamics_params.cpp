#include "cvtele/dynamics_params.hpp"

#include <cmath>
#include <string>

#include "cvtele/errors.hpp"

namespace cvtele {

void DynamicsParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError(std::string("dynamics params: ") + name + " must be finite and >= 0");
    }
  };
  check(G2, "G2");
  check(G3, "G3");
  check(gamma2, "gamma2");
  check(gamma3, "gamma3");
  check(gamma_m, "gamma_m");
  check(n_m, "n_m");
}

DynamicsParams DynamicsParams::reference(double G2) {
  return {G2, 0.2, 0.001, 0.001, 0.02, 10.0};
}

}  // namespace cvtele
