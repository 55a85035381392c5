#include "reslab/orbit.hpp"

#include "reslab/error.hpp"

#include <cmath>
#include <sstream>

namespace reslab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NonHyperbolic: return "NonHyperbolic";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::DivergentRegion: return "DivergentRegion";
    case ErrorKind::MissingPrimitiveData: return "MissingPrimitiveData";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ZeroMapResonance: return "ZeroMapResonance";
    case ErrorKind::ContourTooClose: return "ContourTooClose";
    case ErrorKind::NonIntegerResidue: return "NonIntegerResidue";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::AccuracyDomainExceeded: return "AccuracyDomainExceeded";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::IncompleteSource: return "IncompleteSource";
    }
    return "Unknown";
}

namespace {

bool is_hyperbolic(cplx e) {
    const double m = std::abs(e);
    return m > 0.0 && std::abs(std::log(m)) >= kHyperbolicityTolerance;
}

[[noreturn]] void invalid(const std::string& id, const std::string& msg) {
    throw Error(ErrorKind::Validation, "'" + id + "': " + msg);
}

} // namespace

void validate(const PrimitiveOrbit& orbit) {
    if (!(orbit.primitive_period > 0.0) || !std::isfinite(orbit.primitive_period)) {
        invalid(orbit.id, "primitive_period must be positive and finite");
    }
    if (orbit.weight_eigenvalues.empty()) {
        invalid(orbit.id, "weight_eigenvalues must be nonempty");
    }
    int expanding = 0;
    for (const cplx e : orbit.backward_poincare_eigenvalues) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            invalid(orbit.id, "non-finite Poincare eigenvalue");
        }
        if (!is_hyperbolic(e)) {
            std::ostringstream os;
            os << "Poincare eigenvalue " << e << " is not hyperbolic";
            throw Error(ErrorKind::NonHyperbolic, "'" + orbit.id + "': " + os.str());
        }
        if (std::abs(e) > 1.0) {
            ++expanding;
        }
    }
    if (expanding != orbit.stable_count) {
        invalid(orbit.id, "stable_count " + std::to_string(orbit.stable_count) + " but " +
                              std::to_string(expanding) +
                              " backward eigenvalues have modulus > 1");
    }
}

void validate(const FixedPointDatum& fp) {
    if (fp.generator_eigenvalues.empty()) {
        invalid(fp.id, "generator_eigenvalues must be nonempty");
    }
    if (fp.weight_generator_eigenvalues.empty()) {
        invalid(fp.id, "weight_generator_eigenvalues must be nonempty");
    }
    int negative = 0;
    for (const cplx l : fp.generator_eigenvalues) {
        if (std::abs(l.real()) < kHyperbolicityTolerance) {
            std::ostringstream os;
            os << "generator eigenvalue " << l << " has vanishing real part";
            throw Error(ErrorKind::NonHyperbolic, "'" + fp.id + "': " + os.str());
        }
        if (l.real() < 0.0) {
            ++negative;
        }
    }
    if (negative != fp.stable_count) {
        invalid(fp.id, "stable_count " + std::to_string(fp.stable_count) + " but " +
                           std::to_string(negative) + " eigenvalues have negative real part");
    }
}

int spectral_orientation_index(std::span<const cplx> eigenvalues) {
    int negative = 0;
    for (const cplx e : eigenvalues) {
        if (std::abs(e) > 1.0 && e.imag() == 0.0 && e.real() < 0.0) {
            ++negative;
        }
    }
    return negative % 2;
}

cplx eigen_power(cplx e, int n) {
    if (e.imag() == 0.0) {
        const double m = std::pow(std::abs(e.real()), n);
        return {(e.real() < 0.0 && (n % 2 != 0)) ? -m : m, 0.0};
    }
    return std::polar(std::pow(std::abs(e), n), n * std::arg(e));
}

double det_factor(std::span<const cplx> eigenvalues, int repetition) {
    cplx prod{1.0, 0.0};
    double log_mod = 0.0;
    for (const cplx e : eigenvalues) {
        if (!is_hyperbolic(e)) {
            std::ostringstream os;
            os << "eigenvalue " << e << " within tolerance of the unit circle";
            throw Error(ErrorKind::NonHyperbolic, os.str());
        }
        const cplx f = 1.0 - eigen_power(e, repetition);
        prod *= f;
        log_mod += std::log(std::abs(f));
    }
    const double direct = std::abs(prod);
    if (std::isfinite(direct) && direct > 0.0) {
        return direct;
    }
    return std::exp(log_mod);
}

cplx iterate_weight(std::span<const cplx> weight_eigenvalues, int repetition) {
    cplx sum{};
    for (const cplx a : weight_eigenvalues) {
        sum += eigen_power(a, repetition);
    }
    return sum;
}

cplx geometric_term(const PrimitiveOrbit& orbit, int repetition) {
    return orbit.primitive_period * iterate_weight(orbit.weight_eigenvalues, repetition) /
           det_factor(orbit.backward_poincare_eigenvalues, repetition);
}

} // namespace reslab
