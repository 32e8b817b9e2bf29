#include "qdemux/sellmeier.hpp"

#include <cmath>

#include <fmt/core.h>

#include "qdemux/errors.hpp"

namespace qdemux {

double SellmeierSet::index(double wavelength_um, double temperature_c) const {
  if (!(wavelength_um >= min_wavelength_um && wavelength_um <= max_wavelength_um)) {
    throw DomainError(fmt::format("wavelength {:.4f} um outside validity range [{}, {}] um of Sellmeier set '{}'",
                                  wavelength_um, min_wavelength_um, max_wavelength_um, name));
  }
  const double f = (temperature_c - t_ref_c) * (temperature_c + t_shift_c);
  const double l2 = wavelength_um * wavelength_um;
  const double pole = a[2] + b[2] * f;
  const double n2 = a[0] + b[0] * f + (a[1] + b[1] * f) / (l2 - pole * pole) + (a[3] + b[3] * f) / (l2 - a[4] * a[4]) -
                    a[5] * l2;
  return std::sqrt(n2);
}

SellmeierSet gayer2008_mgo_cln() {
  return SellmeierSet{
      .name = "gayer2008_mgo_cln",
      .citation = "O. Gayer et al., Appl. Phys. B 91, 343 (2008), 5% MgO:CLN n_e",
      .a = {5.756, 0.0983, 0.2020, 189.32, 12.52, 1.32e-2},
      .b = {2.860e-6, 4.700e-8, 6.113e-8, 1.516e-4},
      .t_ref_c = 24.5,
      .t_shift_c = 570.82,
      .min_wavelength_um = 0.5,
      .max_wavelength_um = 4.0,
  };
}

SellmeierSet jundt1997_cln() {
  return SellmeierSet{
      .name = "jundt1997_cln",
      .citation = "D. H. Jundt, Opt. Lett. 22, 1553 (1997), congruent LiNbO3 n_e",
      .a = {5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2},
      .b = {4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5},
      .t_ref_c = 24.5,
      .t_shift_c = 570.82,
      .min_wavelength_um = 0.4,
      .max_wavelength_um = 5.0,
  };
}

std::optional<SellmeierSet> sellmeier_by_name(std::string_view name) {
  if (name == "gayer2008_mgo_cln") return gayer2008_mgo_cln();
  if (name == "jundt1997_cln") return jundt1997_cln();
  return std::nullopt;
}

std::vector<std::string> sellmeier_names() { return {"gayer2008_mgo_cln", "jundt1997_cln"}; }

}  // namespace qdemux
