#pragma once

// Dynamical zeta functions built from periodic-orbit data.
//
//   zeta_1(lambda) = exp( - sum_classes (w / t) e^{i lambda t} )
//   d/dlambda log zeta_1 = (1/i) sum_classes w e^{i lambda t}
//   zeta_R(lambda) = prod_{primitive} (1 - e^{-lambda T#})
//
// The series converge above the abscissa Im(lambda) > a. Below it, zeta_1 is
// continued only through an exact product form prod (1 - r e^{i lambda T}),
// which the lattice systems provide.

#include "reslab/orbit.hpp"
#include "reslab/systems.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace reslab {

enum class ZetaMethod { Auto, Series, Product };

struct ZetaEvaluation {
    cplx value;
    double truncation_horizon = 0.0; // last period summed; +inf for the product form
    double tail_bound = 0.0;
    bool heuristic = false;          // tail_bound is an estimate, not a bound
    ZetaMethod method = ZetaMethod::Series;
};

struct ZetaOptions {
    ZetaMethod method = ZetaMethod::Auto;
    /// Auto switches to the product form when Im(lambda) <= abscissa + margin.
    double continuation_margin = 0.5;
    /// Series stop once a term drops below this fraction of the partial sum.
    double relative_cutoff = 1e-16;
};

[[nodiscard]] ZetaEvaluation zeta1_log_derivative(const PeriodicOrbitData& data, cplx lambda,
                                                  const ZetaOptions& options = {});

[[nodiscard]] ZetaEvaluation zeta1(const PeriodicOrbitData& data, cplx lambda,
                                   const ZetaOptions& options = {});

/// Product over primitive orbits with primitive period <= horizon (default:
/// everything enumerated). Throws Error{MissingPrimitiveData}.
[[nodiscard]] ZetaEvaluation ruelle_zeta(const PeriodicOrbitData& data, cplx lambda,
                                         std::optional<double> horizon = std::nullopt);

/// prod_lines (1 - r e^{i lambda T})^m, evaluated directly.
[[nodiscard]] cplx product_form_zeta1(std::span<const ZetaLine> lines, cplx lambda);

/// Slope of log|w_p| against t_p. Throws Error{InsufficientData} below 4 classes.
[[nodiscard]] double abscissa_estimate(const PeriodicOrbitData& data);

struct ZetaSample {
    cplx value;
    cplx log_derivative;
};

using ZetaFunction = std::function<ZetaSample(cplx)>;

/// Line table prepared for the SIMD product kernel.
class ProductForm {
public:
    explicit ProductForm(std::span<const ZetaLine> lines);

    [[nodiscard]] ZetaSample operator()(cplx lambda) const;
    [[nodiscard]] bool empty() const noexcept { return groups_.empty(); }
    /// Horizontal distance between consecutive zeros on one line (2 pi / T).
    [[nodiscard]] double lattice_spacing() const noexcept { return lattice_spacing_; }

private:
    struct Group {
        std::vector<double> rate_re;
        std::vector<double> rate_im;
    };
    std::map<double, Group> groups_; // keyed by spacing T
    double lattice_spacing_ = 0.0;
};

/// zeta_1 with log-derivative, continued through the product form when the
/// data carry one; otherwise the (convergent-region) series.
struct ContinuedZeta {
    ZetaFunction function;
    double lattice_spacing = 0.0;
};

[[nodiscard]] ContinuedZeta continued_zeta(const PeriodicOrbitData& data);

} // namespace reslab
