#pragma once

// Periodic-orbit data and the per-orbit arithmetic shared by every engine.
//
// Poincare spectra are stored for the BACKWARD return map (derivative of the
// time -T flow restricted to the transverse space). Under this convention the
// stable directions of the flow are exactly the eigenvalues of modulus > 1.

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace reslab {

using cplx = std::complex<double>;

/// Minimum |log|e|| for an eigenvalue to count as hyperbolic.
inline constexpr double kHyperbolicityTolerance = 1e-9;

struct PrimitiveOrbit {
    std::string id;
    double primitive_period = 1.0;
    std::vector<cplx> backward_poincare_eigenvalues;
    int stable_count = 0;
    bool stable_orientable = true;
    std::vector<cplx> weight_eigenvalues{cplx{1.0, 0.0}};

    /// 0 when E_s is orientable along the orbit, 1 otherwise.
    [[nodiscard]] int orientation_index() const noexcept { return stable_orientable ? 0 : 1; }
    [[nodiscard]] std::size_t transverse_dimension() const noexcept {
        return backward_poincare_eigenvalues.size();
    }
};

/// Hyperbolic fixed point x0 with d(phi^t)|x0 = exp(tA).
struct FixedPointDatum {
    std::string id;
    std::vector<cplx> generator_eigenvalues;
    int stable_count = 0;
    std::vector<cplx> weight_generator_eigenvalues{cplx{0.0, 0.0}};
};

/// n-th traversal of a primitive orbit.
struct OrbitIterate {
    const PrimitiveOrbit* orbit = nullptr;
    int repetition = 1;

    [[nodiscard]] double total_period() const noexcept {
        return repetition * orbit->primitive_period;
    }
};

/// Aggregated geometric weight of all orbit iterates sharing one total period.
struct PeriodClass {
    double total_period = 0.0;
    cplx geometric_weight{};
};

// Validation throws Error{Validation} naming the offending id.
void validate(const PrimitiveOrbit& orbit);
void validate(const FixedPointDatum& fixed_point);

/// Orientation index read off a spectrum: parity of the number of negative
/// real eigenvalues among the stable ones (|e| > 1). Meaningful when complex
/// eigenvalues come in conjugate pairs.
[[nodiscard]] int spectral_orientation_index(std::span<const cplx> backward_eigenvalues);

/// e^n computed through modulus and argument, exact sign for real input.
[[nodiscard]] cplx eigen_power(cplx e, int n);

/// |det(I - P^n)| = |prod_j (1 - e_j^n)|. Throws Error{NonHyperbolic}.
[[nodiscard]] double det_factor(std::span<const cplx> eigenvalues, int repetition);

/// Tr(alpha^n) = sum_l a_l^n.
[[nodiscard]] cplx iterate_weight(std::span<const cplx> weight_eigenvalues, int repetition);

/// T# Tr(alpha^n) / |det(I - P^n)|, the delta-mass coefficient of one iterate.
[[nodiscard]] cplx geometric_term(const PrimitiveOrbit& orbit, int repetition);

} // namespace reslab
