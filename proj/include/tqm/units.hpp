#pragma once

#include <string_view>

namespace tqm {

struct UnitSystem {
    static constexpr double hbar_eVs = 6.582119569e-16;
    static constexpr double c_m_per_s = 2.99792458e8;
    static constexpr double planck_time_s = 5.39116e-44;
};

// Units: eV, keV, MeV (energy); s, fs, as (time); m, nm, pm (length);
// 1/eV, 1/keV, 1/MeV natural time/length, convertible to either via hbar or hbar*c.
double convert_units(double value, std::string_view from, std::string_view to);

}  // namespace tqm
