#pragma once

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyclores/evolution.hpp"
#include "cyclores/phase_space.hpp"
#include "cyclores/spectrum.hpp"

// CSV emitters. Floats are written with 17 significant digits so values round-trip.
// Cells are labelled from 1 in all outputs.
namespace cyclores::csv {

std::string number(double value);

/// n,probability
void write_snapshot(std::ostream& out, const StateVector& state);

/// t,P1,...,Pk
void write_series(std::ostream& out, std::span<const double> times,
                  const std::vector<std::vector<double>>& rows);

/// cell,mean_probability
void write_profile(std::ostream& out, std::span<const double> averages);

/// inv_h,h,penetration,barrier_level,start_level
void write_scan(std::ostream& out, std::span<const ScanPoint> points);

/// q,energy
void write_spectrum(std::ostream& out, const QeSpectrum& spectrum);

/// n,A0,...,A{N-1}; row n holds component n of every eigenvector.
void write_eigenvectors(std::ostream& out, const QeSpectrum& spectrum);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// "# key = value" lines, then x,p,Q in grid order (x outer).
void write_husimi(std::ostream& out, const HusimiGrid& grid, const Metadata& metadata);

/// index,level
void write_contour_levels(std::ostream& out, std::span<const double> levels);

}  // namespace cyclores::csv
