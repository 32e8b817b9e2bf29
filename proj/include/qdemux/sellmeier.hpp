#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qdemux {

/// Temperature-dependent extraordinary index of lithium niobate in the
/// extended Sellmeier form
///
///   n^2 = a1 + b1 f + (a2 + b2 f) / (l^2 - (a3 + b3 f)^2)
///            + (a4 + b4 f) / (l^2 - a5^2) - a6 l^2,
///   f   = (T - t_ref) (T + t_shift),
///
/// with l in um and T in degrees C.
struct SellmeierSet {
  std::string name;
  std::string citation;
  std::array<double, 6> a{};
  std::array<double, 4> b{};
  double t_ref_c = 24.5;
  double t_shift_c = 570.82;
  double min_wavelength_um = 0.5;
  double max_wavelength_um = 4.0;

  /// Throws DomainError outside [min_wavelength_um, max_wavelength_um].
  double index(double wavelength_um, double temperature_c) const;
};

/// 5 mol% MgO-doped congruent LiNbO3, extraordinary ray.
SellmeierSet gayer2008_mgo_cln();
/// Undoped congruent LiNbO3, extraordinary ray.
SellmeierSet jundt1997_cln();

std::optional<SellmeierSet> sellmeier_by_name(std::string_view name);
std::vector<std::string> sellmeier_names();

}  // namespace qdemux
