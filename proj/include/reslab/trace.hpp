#pragma once

// Local trace formula checks: the orbit sum of a bump function against the
// sum of its Fourier-Laplace transform over resonances.

#include "reslab/resonance.hpp"
#include "reslab/systems.hpp"

#include <optional>
#include <vector>

namespace reslab {

/// phi_{l,d}(t) = phi((t - d) / l), phi(x) = exp(1 - 1/(1 - x^2)) on |x| < 1.
struct BumpSpec {
    double l = 0.5;
    double d = 3.0;
    int quadrature_order = 200;

    /// Throws Error{Validation} unless 0 < l < 1, d > l (support inside t > 0)
    /// and order >= 2.
    void validate() const;
};

/// Integrals over the unit bump: int phi = 1.20690032243782...
inline constexpr double kBumpMass = 1.2069003224378223;

[[nodiscard]] double bump_unit(double x) noexcept;
[[nodiscard]] double bump_value(const BumpSpec& spec, double t) noexcept;

/// Largest |Im mu| for which bump_fourier is trusted, 50 / l.
[[nodiscard]] double bump_accuracy_limit(const BumpSpec& spec) noexcept;

/// hat phi_{l,d}(mu) = int e^{-i mu t} phi_{l,d}(t) dt by Gauss-Legendre.
/// Throws Error{AccuracyDomainExceeded}.
[[nodiscard]] cplx bump_fourier(const BumpSpec& spec, cplx mu);

/// || phi^(N) ||_{L^1(-1,1)} of the unit bump (cached per N).
[[nodiscard]] double bump_derivative_norm(int order);

/// Sum over period classes of w * phi_{l,d}(t). Throws Error{HorizonTooShort}.
[[nodiscard]] cplx geometric_side(const PeriodicOrbitData& data, const BumpSpec& spec);

/// int phi_{l,d}(t) sum_l e^{-mu_l t} / |det(I - e^{-tA})| dt for one fixed point.
[[nodiscard]] cplx fixed_point_geometric_term(const FixedPointDatum& fp, const BumpSpec& spec);

struct SpectralSum {
    cplx value;
    double tail_bound = 0.0;
    std::size_t terms = 0;
};

inline constexpr int kIntegrationByPartsOrder = 8;

/// Sum over listed resonances with Im > -A and |Re| <= re_cutoff. Listed
/// points beyond the cutoff enter the tail bound individually.
[[nodiscard]] SpectralSum spectral_side(const std::vector<Resonance>& resonances,
                                        const BumpSpec& spec, double A, double re_cutoff);

/// Same over lattice lines; each line contributes an integration-by-parts
/// tail for its points beyond re_cutoff.
[[nodiscard]] SpectralSum spectral_side(const std::vector<LatticeLine>& lines,
                                        const BumpSpec& spec, double A, double re_cutoff);

struct TraceOptions {
    double re_cutoff = 400.0;
    /// Constants of the reported bound shape C l^{-2n-2} e^{(d-l)(-A+eps)}.
    double shape_constant = 1.0;
    double shape_epsilon = 0.1;
    std::optional<int> dimension; // default: ambient dimension of the system
};

struct TraceReport {
    cplx geometric_side;
    cplx spectral_side;
    double strip_depth = 0.0; // A
    double spectral_tail_bound = 0.0;
    cplx residual;            // geometric - spectral
    double bound_shape_value = 0.0;
    double shape_constant = 1.0;
    double shape_epsilon = 0.1;
    int dimension = 3;
    double l = 0.0;
    double d = 0.0;
    double re_cutoff = 0.0;
    std::size_t spectral_terms = 0;
    /// Spectral terms below this Im were bounded, not summed (line-complete mode).
    double summation_floor = 0.0;
};

/// Exact-lattice spectral side. A = +inf sums every line of the system down
/// to the quadrature floor and bounds the rest.
[[nodiscard]] TraceReport trace_check(const SystemModel& model, const BumpSpec& spec, double A,
                                      const TraceOptions& options = {});

/// Spectral side from an explicit resonance list (for instance located ones).
[[nodiscard]] TraceReport trace_check(const SystemModel& model,
                                      const std::vector<Resonance>& resonances,
                                      const BumpSpec& spec, double A,
                                      const TraceOptions& options = {});

[[nodiscard]] double bound_shape(double C, double l, double d, double A, double epsilon, int n);

} // namespace reslab
