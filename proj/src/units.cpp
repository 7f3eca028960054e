#include "tqm/units.hpp"

#include <string>

#include "tqm/common.hpp"

namespace tqm {

namespace {

enum class Dim { Energy, Time, Length, Natural };

struct Unit {
    Dim dim;
    double scale;  // to eV, s, m, or 1/eV
};

Unit lookup(std::string_view u) {
    if (u == "eV") return {Dim::Energy, 1.0};
    if (u == "keV") return {Dim::Energy, 1e3};
    if (u == "MeV") return {Dim::Energy, 1e6};
    if (u == "s") return {Dim::Time, 1.0};
    if (u == "fs") return {Dim::Time, 1e-15};
    if (u == "as") return {Dim::Time, 1e-18};
    if (u == "m") return {Dim::Length, 1.0};
    if (u == "nm") return {Dim::Length, 1e-9};
    if (u == "pm") return {Dim::Length, 1e-12};
    if (u == "1/eV" || u == "eV^-1") return {Dim::Natural, 1.0};
    if (u == "1/keV" || u == "keV^-1") return {Dim::Natural, 1e-3};
    if (u == "1/MeV" || u == "MeV^-1") return {Dim::Natural, 1e-6};
    throw ConfigError("unknown unit: " + std::string(u));
}

}  // namespace

double convert_units(double value, std::string_view from, std::string_view to) {
    Unit a = lookup(from), b = lookup(to);
    if (a.dim == b.dim) return value * a.scale / b.scale;
    // natural <-> time via hbar, natural <-> length via hbar c
    auto to_natural = [](Unit u, double v) {
        if (u.dim == Dim::Time) return v * u.scale / UnitSystem::hbar_eVs;
        if (u.dim == Dim::Length) return v * u.scale / (UnitSystem::hbar_eVs * UnitSystem::c_m_per_s);
        throw ConfigError("incompatible units");
    };
    if (b.dim == Dim::Natural) return to_natural(a, value) / b.scale;
    if (a.dim == Dim::Natural) {
        double nat = value * a.scale;
        if (b.dim == Dim::Time) return nat * UnitSystem::hbar_eVs / b.scale;
        if (b.dim == Dim::Length) return nat * UnitSystem::hbar_eVs * UnitSystem::c_m_per_s / b.scale;
    }
    if ((a.dim == Dim::Time || a.dim == Dim::Length) && (b.dim == Dim::Time || b.dim == Dim::Length)) {
        double nat = to_natural(a, value);
        return convert_units(nat, "1/eV", to);
    }
    throw ConfigError("incompatible units: " + std::string(from) + " -> " + std::string(to));
}

}  // namespace tqm
