#pragma once

// Model systems and the periodic-orbit data they generate.

#include "reslab/orbit.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace reslab {

using BigInt = boost::multiprecision::cpp_int;
using IntMatrix2 = std::array<std::array<std::int64_t, 2>, 2>;

struct ToralSuspension {
    IntMatrix2 matrix{};
    double roof = 1.0;
};

/// Linear horseshoe on k symbols: uniform expansion mu > 1, contraction
/// nu in (0,1), fiber weight g_i on symbol i.
struct HorseshoeSuspension {
    double expansion = 4.0;
    double contraction = 0.25;
    int symbol_count = 2;
    std::vector<double> symbol_weights{1.0, 1.0};
    double roof = 1.0;

    [[nodiscard]] double weight_sum() const noexcept;
};

struct MorseSmale {
    std::vector<PrimitiveOrbit> closed_orbits;
    std::vector<FixedPointDatum> fixed_points;
};

struct ExplicitOrbits {
    std::vector<PrimitiveOrbit> orbits;
};

using SystemSpec = std::variant<ToralSuspension, HorseshoeSuspension, MorseSmale, ExplicitOrbits>;

/// Factor (1 - rate * exp(i lambda spacing))^multiplicity of the product form of zeta_1.
/// For suspensions the rates are the map-level resonances.
struct ZetaLine {
    cplx rate;
    double spacing = 1.0;
    int multiplicity = 1;
};

/// A primitive orbit standing for `count` orbits with identical data
/// (toral suspensions have exponentially many, all alike).
struct OrbitFamily {
    PrimitiveOrbit orbit;
    double count = 1.0;
};

struct PeriodicOrbitData {
    std::vector<PeriodClass> period_classes; // strictly increasing total_period
    std::optional<std::vector<OrbitFamily>> primitive_orbits;
    double horizon = 0.0;           // covers every period class
    double primitive_horizon = 0.0; // covers every enumerated primitive orbit
    /// Exact product representation of zeta_1, when the system has one.
    std::optional<std::vector<ZetaLine>> product_lines;
    /// Upper bound on sum |rate| * multiplicity over lines dropped by truncation.
    double omitted_line_mass = 0.0;
};

// --- toral automorphisms -------------------------------------------------

/// Throws Error{NotHyperbolic} / Error{Validation}.
void validate(const ToralSuspension& spec);

/// N_p = |det(A^p - I)|, exact.
[[nodiscard]] BigInt toral_fixed_point_count(const IntMatrix2& matrix, int p);

/// Number of primitive periodic orbits of least period p (Moebius inversion of N_p).
[[nodiscard]] BigInt toral_primitive_orbit_count(const IntMatrix2& matrix, int p);

[[nodiscard]] PeriodicOrbitData toral_suspension_period_classes(const ToralSuspension& spec,
                                                                int max_multiple);

// --- horseshoes ----------------------------------------------------------

void validate(const HorseshoeSuspension& spec);

using Word = std::vector<int>;

/// All Lyndon words over {0..k-1} with length <= max_length, lexicographic order.
[[nodiscard]] std::vector<Word> lyndon_words(int symbol_count, int max_length);

/// (1/p) sum_{d|p} moebius(d) k^{p/d}.
[[nodiscard]] BigInt necklace_count(int symbol_count, int length);

[[nodiscard]] PrimitiveOrbit horseshoe_cycle_orbit(const HorseshoeSuspension& spec,
                                                   const Word& word);

/// Per-cycle enumeration from Lyndon words; classes aggregated from the cycles.
[[nodiscard]] PeriodicOrbitData horseshoe_orbits(const HorseshoeSuspension& spec,
                                                 int max_word_length);

/// Closed-form class weights T (sum g)^p / ((1 - mu^-p)(nu^-p - 1)), 1 <= p <= max_multiple.
[[nodiscard]] std::vector<PeriodClass> horseshoe_period_classes(const HorseshoeSuspension& spec,
                                                                int max_multiple);

/// Lines r_kl = (sum g) nu^(l+1) mu^(-k), 0 <= k,l <= truncation.
[[nodiscard]] std::vector<ZetaLine> horseshoe_lines(const HorseshoeSuspension& spec,
                                                    int truncation, double* omitted_mass = nullptr);

// --- closed orbits and Morse-Smale assemblies ----------------------------

/// Expansion of a single closed orbit's class weights into product-form lines.
/// Lines with |rate| < rate_floor are dropped; their total mass is added to
/// *omitted_mass when given.
[[nodiscard]] std::vector<ZetaLine> closed_orbit_lines(const PrimitiveOrbit& orbit,
                                                       double rate_floor,
                                                       double* omitted_mass = nullptr);

/// Period classes of an explicit orbit list, all iterates with total period <= horizon.
[[nodiscard]] PeriodicOrbitData orbit_list_data(const std::vector<PrimitiveOrbit>& orbits,
                                                double horizon, double rate_floor);

struct MorseSmaleAssembly {
    PeriodicOrbitData orbits;
    std::vector<FixedPointDatum> fixed_points;
};

[[nodiscard]] MorseSmaleAssembly assemble_morse_smale(const MorseSmale& spec, double horizon,
                                                      double rate_floor = 1e-16);

// --- whole-system view ---------------------------------------------------

struct BuildOptions {
    /// Number of roof units (suspensions) or of shortest-period units (orbit lists).
    int horizon_multiples = 60;
    int line_truncation = 40;
    int max_word_length = 12;
    double rate_floor = 1e-16;
};

struct SystemModel {
    SystemSpec spec;
    PeriodicOrbitData data;
    std::vector<FixedPointDatum> fixed_points;
    double roof = 1.0;          // basic period for suspensions, shortest period otherwise
    int ambient_dimension = 3;  // flow dimension n
};

void validate(const SystemSpec& spec);

[[nodiscard]] SystemModel build_model(const SystemSpec& spec, const BuildOptions& options = {});

} // namespace reslab
