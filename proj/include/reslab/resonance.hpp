#pragma once

// Resonance sets: exact lattices from the closed-form formulas, and numerical
// localization of the zeros of zeta_1 by the argument principle.

#include "reslab/orbit.hpp"
#include "reslab/systems.hpp"
#include "reslab/zeta.hpp"

#include <limits>
#include <vector>

namespace reslab {

enum class Provenance { ExactLattice, Located };

[[nodiscard]] std::string_view to_string(Provenance p) noexcept;

struct Resonance {
    cplx value;
    int multiplicity = 1;
    Provenance provenance = Provenance::ExactLattice;
};

/// Closed rectangle re_min <= Re <= re_max, im_min <= Im <= im_max.
/// im_max may be +inf for lattice enumeration.
struct WindowSpec {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = -1.0;
    double im_max = 1.0;

    [[nodiscard]] bool contains(cplx z, double slack = 0.0) const noexcept;
    [[nodiscard]] double width() const noexcept { return re_max - re_min; }
    [[nodiscard]] double height() const noexcept { return im_max - im_min; }
    /// Throws Error{Validation}. `bounded` also requires a finite im_max.
    void validate(bool bounded = false) const;
};

struct MapResonance {
    cplx value;
    int multiplicity = 1;
};

struct MapResonanceSet {
    std::vector<MapResonance> entries;
};

inline constexpr double kMergeTolerance = 1e-9;

/// Points offset + n * spacing, n in Z, each of the given multiplicity.
/// spacing == 0 marks an isolated point.
struct LatticeLine {
    cplx offset;
    double spacing = 0.0;
    int multiplicity = 1;
};

/// Sorts by (Re, Im) and adds the multiplicities of points within tolerance.
[[nodiscard]] std::vector<Resonance> merge_resonances(std::vector<Resonance> points,
                                                      double tolerance = kMergeTolerance);

/// Lattice points of the lines inside the window, merged.
[[nodiscard]] std::vector<Resonance> lattice_points(const std::vector<LatticeLine>& lines,
                                                    const WindowSpec& window);

// --- exact lattices ------------------------------------------------------

/// lambda = (i log rho + 2 pi n) / roof for each map resonance rho.
/// Throws Error{ZeroMapResonance}.
[[nodiscard]] std::vector<LatticeLine> suspension_lattice_lines(const MapResonanceSet& map_res,
                                                                double roof);
[[nodiscard]] std::vector<Resonance> exact_suspension_lattice(const MapResonanceSet& map_res,
                                                              double roof,
                                                              const WindowSpec& window);

/// Lines of one closed orbit with Im >= im_floor, one per (l, k) representation.
[[nodiscard]] std::vector<LatticeLine> closed_orbit_lattice_lines(const PrimitiveOrbit& orbit,
                                                                  double im_floor);
[[nodiscard]] std::vector<Resonance> exact_morse_smale_closed_orbit(const PrimitiveOrbit& orbit,
                                                                    const WindowSpec& window);

[[nodiscard]] std::vector<LatticeLine> fixed_point_lattice_lines(const FixedPointDatum& fp,
                                                                 double im_floor);
[[nodiscard]] std::vector<Resonance> exact_fixed_point_lattice(const FixedPointDatum& fp,
                                                               const WindowSpec& window);

[[nodiscard]] std::vector<Resonance> morse_smale_union(const MorseSmale& system,
                                                       const WindowSpec& window);

/// Map resonances of a suspension down to |rho| >= exp(im_floor * roof).
[[nodiscard]] MapResonanceSet suspension_map_resonances(const SystemSpec& spec, double im_floor);

/// Every exact lattice line of the system with Im >= im_floor.
[[nodiscard]] std::vector<LatticeLine> exact_lattice_lines(const SystemSpec& spec,
                                                           double im_floor);

[[nodiscard]] std::vector<Resonance> exact_resonances(const SystemSpec& spec,
                                                      const WindowSpec& window);

// --- argument principle --------------------------------------------------

struct ContourOptions {
    double edge_clearance = 1e-6;
    /// Absolute quadrature target on the winding number.
    double winding_tolerance = 1e-3;
    double integer_guard = 0.1;
    int perturbation_attempts = 3;
    /// Horizontal spacing of zeros along a lattice line (2 pi / roof).
    double lattice_spacing = 2.0 * 3.14159265358979323846;
};

struct ContourCount {
    int count = 0;
    double raw = 0.0;        // real part of the winding integral
    WindowSpec window;       // after any outward perturbation
    int perturbations = 0;
};

/// Counts zeros inside the rectangle, perturbing edges outward when a zero
/// sits within edge_clearance. Throws ContourTooClose / NonIntegerResidue.
[[nodiscard]] ContourCount count_zeros(const ZetaFunction& zeta, const WindowSpec& window,
                                       const ContourOptions& options = {});

[[nodiscard]] int count_zeros_argument_principle(const ZetaFunction& zeta,
                                                 const WindowSpec& window,
                                                 const ContourOptions& options = {});

/// Winding number of zeta around the circle |z - center| = radius.
[[nodiscard]] double circle_winding(const ZetaFunction& zeta, cplx center, double radius,
                                    double tolerance = 1e-3);

struct NewtonOptions {
    double tolerance = 1e-10;
    int max_iterations = 100;
    /// Give up when the iterate leaves this distance from the seed.
    double trust_radius = std::numeric_limits<double>::infinity();
    /// Longest single step.
    double max_step = 1.0;
};

/// Damped Newton on zeta_1 with step -1/(zeta'/zeta). Multiplicity from a
/// small-circle winding count. Throws Error{NoConvergence}.
[[nodiscard]] Resonance refine_newton(const ZetaFunction& zeta, cplx seed,
                                      const NewtonOptions& options = {});

struct LocateOptions {
    ContourOptions contour;
    NewtonOptions newton;
    double seed_diameter = 1e-2;
    /// Boxes of the first partition have sides at most this long (default pi / roof).
    double max_box_side = 0.0;
};

struct LocateResult {
    std::vector<Resonance> resonances;
    int total_count = 0;
    WindowSpec window; // the counted window (after perturbation)
};

/// Subdivide, count, bisect to seed_diameter, refine, merge. The total
/// multiplicity always equals the count of the full window; otherwise
/// Error{CountMismatch}.
[[nodiscard]] LocateResult locate_resonances(const ZetaFunction& zeta, const WindowSpec& window,
                                             const LocateOptions& options = {});

} // namespace reslab
