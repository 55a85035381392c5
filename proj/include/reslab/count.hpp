#pragma once

// Resonance counting in strips below the real axis.

#include "reslab/resonance.hpp"

#include <vector>

namespace reslab {

/// A resonance list together with the region where it is known to be complete.
struct ResonanceSource {
    std::vector<Resonance> points;
    WindowSpec complete_in;
};

/// Exact lattice of the system, complete in |Re| <= re_extent, Im >= -beta.
[[nodiscard]] ResonanceSource exact_source(const SystemSpec& spec, double re_extent, double beta);

/// #{mu : |mu| <= E, Im mu > -beta} with multiplicity.
/// Throws Error{IncompleteSource} when that region leaves source.complete_in.
[[nodiscard]] int count_in_strip(const ResonanceSource& source, double E, double beta);

/// Largest multiplicity-weighted count in a window |Re lambda - x| <= 1 over
/// all x, among points with Im > -beta and |Re| <= E.
[[nodiscard]] int per_unit_max(const ResonanceSource& source, double E, double beta);

struct StripCount {
    double E = 0.0;
    int count = 0;
    int per_unit = 0;
};

struct CountReport {
    double beta = 0.0;
    std::vector<StripCount> strip_counts;
    int per_unit_max = 0;
    double fitted_exponent = 0.0;
    double half_width = 0.0; // two standard errors of the slope
    double prefactor = 0.0;  // exp(intercept): N ~ prefactor * E^exponent
};

/// Counts on the grid and the least-squares slope of log N against log E.
/// Throws Error{InsufficientData} with fewer than 6 points or N = 0 at the
/// smallest E; Error{Validation} unless the grid is positive and increasing.
[[nodiscard]] CountReport growth_fit(const ResonanceSource& source, const std::vector<double>& grid,
                                     double beta);

} // namespace reslab
