#pragma once

#include <cmath>

#include "hbarsim/errors.hpp"

namespace hbarsim {

// Unit-system bundle. Everything downstream takes these as plain numbers, so
// swapping in natural units changes no formula.
struct PhysicalConstants {
  double h = 6.626070040e-34;             // J s
  double hbar = 6.626070040e-34 / (2.0 * M_PI);  // J s
  double c = 299792458.0;                 // m/s
  double electronvolt = 1.602176634e-19;  // J

  static PhysicalConstants si() { return PhysicalConstants{}; }

  static PhysicalConstants natural() {
    PhysicalConstants k;
    k.hbar = 1.0;
    k.h = 2.0 * M_PI;
    k.c = 1.0;
    k.electronvolt = 1.0;
    return k;
  }

  // Derive the reduced constant from h, keeping the pair consistent.
  static PhysicalConstants from_h(double h_value) {
    PhysicalConstants k;
    k.h = h_value;
    k.hbar = h_value / (2.0 * M_PI);
    return k;
  }

  void validate() const {
    if (!(h > 0.0) || !(c > 0.0) || !(electronvolt > 0.0))
      throw ValidationError("physical constants must be positive");
    const double expected = h / (2.0 * M_PI);
    if (std::abs(hbar - expected) > 1e-12 * expected)
      throw ValidationError("hbar inconsistent with h/(2*pi)");
  }
};

// Experimental upper bound on the noise strength and the implied energy
// scale hbar / tau_max.
struct TauBound {
  double tau_max = 0.0;     // s
  double lambda_gev = 0.0;  // GeV
};

}  // namespace hbarsim
