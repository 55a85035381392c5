#include "reslab/trace.hpp"

#include "reslab/error.hpp"
#include "reslab/kernels.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace reslab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();
// Mixing exponent for the deep-remainder bound: sum |r| over lines below the
// floor F is at most e^{(1-theta) F T} sum |r|^theta.
constexpr double kTheta = 0.5;

int effective_order(const BumpSpec& spec, double max_abs_mu) {
    const double need = 0.75 * spec.l * max_abs_mu + 50.0;
    return std::max(spec.quadrature_order, static_cast<int>(std::ceil(need)));
}

// Nodes t_j on [d - l, d + l] and weights l w_j phi(x_j), dropping
// nodes where phi underflows.
struct BumpRule {
    std::vector<double> t;
    std::vector<double> weight;
};

BumpRule bump_rule(const BumpSpec& spec, int order) {
    const GaussLegendreRule& gl = gauss_legendre(order);
    BumpRule rule;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        const double phi = bump_unit(gl.nodes[j]);
        if (phi == 0.0) {
            continue;
        }
        rule.t.push_back(spec.d + spec.l * gl.nodes[j]);
        rule.weight.push_back(spec.l * gl.weights[j] * phi);
    }
    return rule;
}

void check_domain(const BumpSpec& spec, cplx mu) {
    if (std::abs(mu.imag()) > bump_accuracy_limit(spec) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "|Im mu| = " << std::abs(mu.imag()) << " exceeds the quadrature accuracy limit "
           << bump_accuracy_limit(spec) << " (50 / l)";
        throw Error(ErrorKind::AccuracyDomainExceeded, os.str());
    }
}

// |hat phi(mu)| <= ||phi^(N)|| l^{1-N} e^{max_t Im(mu) t} |mu|^{-N}
double ibp_prefactor(const BumpSpec& spec, double im) {
    const int n = kIntegrationByPartsOrder;
    const double growth = std::max(im * (spec.d - spec.l), im * (spec.d + spec.l));
    return bump_derivative_norm(n) * (1.0 + 1e-9) * std::pow(spec.l, 1 - n) * std::exp(growth);
}

// Truncated Taylor jets for the derivatives of phi.
double bump_derivative(int order, double x) {
    const double u0 = 1.0 - x * x;
    if (u0 <= 0.0 || 1.0 / u0 > 700.0) {
        return 0.0;
    }
    std::vector<double> u(order + 1, 0.0), v(order + 1, 0.0), w(order + 1, 0.0),
        e(order + 1, 0.0);
    u[0] = u0;
    if (order >= 1) {
        u[1] = -2.0 * x;
    }
    if (order >= 2) {
        u[2] = -1.0;
    }
    v[0] = 1.0 / u0;
    for (int k = 1; k <= order; ++k) {
        double s = 0.0;
        for (int i = 1; i <= std::min(k, 2); ++i) {
            s += u[i] * v[k - i];
        }
        v[k] = -s / u0;
    }
    w[0] = 1.0 - v[0];
    for (int k = 1; k <= order; ++k) {
        w[k] = -v[k];
    }
    e[0] = std::exp(w[0]);
    for (int k = 1; k <= order; ++k) {
        double s = 0.0;
        for (int i = 1; i <= k; ++i) {
            s += i * w[i] * e[k - i];
        }
        e[k] = s / k;
    }
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) {
        factorial *= k;
    }
    return factorial * e[order];
}

double sum_abs_power(const std::vector<cplx>& values, double theta) {
    double s = 0.0;
    for (const cplx v : values) {
        s += std::pow(std::abs(v), theta);
    }
    return s;
}

// sum over (l, k) of |r_lk|^theta for one closed orbit.
double closed_orbit_theta_mass(const PrimitiveOrbit& orbit) {
    double s = sum_abs_power(orbit.weight_eigenvalues, kTheta);
    for (const cplx e : orbit.backward_poincare_eigenvalues) {
        const double m = std::abs(e);
        if (m > 1.0) {
            const double q = std::pow(1.0 / m, kTheta);
            s *= q / (1.0 - q);
        } else {
            s /= 1.0 - std::pow(m, kTheta);
        }
    }
    return s;
}

// Bound on T sum_p |r|^p phi(pT) summed over every line with Im < floor.
double deep_line_bound(double theta_mass, double period, const BumpSpec& spec, double floor) {
    const double lo = spec.d - spec.l;
    const double hi = spec.d + spec.l;
    const double p0 = std::max(1.0, std::ceil(lo / period - 1e-12));
    double count = 0.0;
    for (double p = p0; p * period < hi; p += 1.0) {
        count += 1.0;
    }
    if (count == 0.0) {
        return 0.0;
    }
    return period * count * std::exp(floor * period * (p0 - kTheta)) * theta_mass;
}

double deep_fixed_point_bound(const FixedPointDatum& fp, const BumpSpec& spec, double floor) {
    const double c0 = spec.d - spec.l;
    double s = 0.0;
    for (const cplx mu : fp.weight_generator_eigenvalues) {
        s += std::exp(kTheta * c0 * (-mu.real()));
    }
    for (const cplx lam : fp.generator_eigenvalues) {
        const double q = std::exp(-kTheta * c0 * std::abs(lam.real()));
        s *= (lam.real() < 0.0 ? q : 1.0) / (1.0 - q);
    }
    return spec.l * kBumpMass * std::exp((1.0 - kTheta) * c0 * floor) * s;
}

double deep_remainder_bound(const SystemSpec& system, const BumpSpec& spec, double floor) {
    if (std::holds_alternative<ToralSuspension>(system)) {
        return 0.0; // single line at Im 0
    }
    if (const auto* hs = std::get_if<HorseshoeSuspension>(&system)) {
        const double g = std::abs(hs->weight_sum());
        if (g == 0.0) {
            return 0.0;
        }
        const double nu = std::pow(hs->contraction, kTheta);
        const double mu = std::pow(hs->expansion, -kTheta);
        const double mass = std::pow(g, kTheta) * nu / ((1.0 - nu) * (1.0 - mu));
        return deep_line_bound(mass, hs->roof, spec, floor);
    }
    double bound = 0.0;
    auto orbits = [&](const std::vector<PrimitiveOrbit>& list) {
        for (const auto& o : list) {
            bound += deep_line_bound(closed_orbit_theta_mass(o), o.primitive_period, spec, floor);
        }
    };
    if (const auto* ms = std::get_if<MorseSmale>(&system)) {
        orbits(ms->closed_orbits);
        for (const auto& fp : ms->fixed_points) {
            bound += deep_fixed_point_bound(fp, spec, floor);
        }
    } else {
        orbits(std::get<ExplicitOrbits>(system).orbits);
    }
    return bound;
}

struct LineSum {
    cplx value;
    double tail = 0.0;
    std::size_t terms = 0;
};

LineSum sum_line(const LatticeLine& line, const BumpSpec& spec, double re_cutoff) {
    LineSum out;
    const double m = line.multiplicity;
    const double im = line.offset.imag();
    const int n = kIntegrationByPartsOrder;
    if (line.spacing == 0.0) {
        if (std::abs(line.offset.real()) <= re_cutoff) {
            out.value = m * bump_fourier(spec, line.offset);
            out.terms = 1;
        } else {
            out.tail = m * ibp_prefactor(spec, im) * std::pow(std::abs(line.offset), -n);
        }
        return out;
    }
    check_domain(spec, line.offset);
    const double s = line.spacing;
    const double re = line.offset.real();
    const auto first = static_cast<long long>(std::ceil((-re_cutoff - re) / s));
    const auto last = static_cast<long long>(std::floor((re_cutoff - re) / s));
    if (last >= first) {
        const std::size_t count = static_cast<std::size_t>(last - first + 1);
        const double max_re = std::max(std::abs(re + first * s), std::abs(re + last * s));
        const BumpRule rule = bump_rule(spec, effective_order(spec, std::hypot(max_re, im)));
        const cplx mu0 = line.offset + static_cast<double>(first) * s;
        std::vector<double> cre(rule.t.size()), cim(rule.t.size()), sre(rule.t.size()),
            sim(rule.t.size());
        for (std::size_t j = 0; j < rule.t.size(); ++j) {
            const cplx c = rule.weight[j] * std::exp(-kI * mu0 * rule.t[j]);
            const cplx q = std::polar(1.0, -s * rule.t[j]);
            cre[j] = c.real();
            cim[j] = c.imag();
            sre[j] = q.real();
            sim[j] = q.imag();
        }
        std::vector<cplx> terms(count);
        kernels::phasor_sweep(cre, cim, sre, sim, terms);
        // Reduce from the largest |Re mu| inwards so small terms accumulate first.
        std::size_t lo = 0;
        std::size_t hi = count;
        cplx sum{};
        while (lo < hi) {
            const double a = std::abs(re + (first + static_cast<long long>(lo)) * s);
            const double b = std::abs(re + (first + static_cast<long long>(hi - 1)) * s);
            if (a >= b) {
                sum += terms[lo++];
            } else {
                sum += terms[--hi];
            }
        }
        out.value = m * sum;
        out.terms = count;
    }
    // Points beyond the cutoff on both sides: |mu| >= |Re mu| > re_cutoff, spacing s.
    const double r = std::max(re_cutoff, 1e-300);
    const double tail_sum = 2.0 * (std::pow(r, -n) + std::pow(r, 1 - n) / ((n - 1) * s));
    out.tail = m * ibp_prefactor(spec, im) * tail_sum;
    return out;
}

void add_fixed_points(const SystemModel& model, const BumpSpec& spec, cplx& geometric) {
    for (const FixedPointDatum& fp : model.fixed_points) {
        geometric += fixed_point_geometric_term(fp, spec);
    }
}

TraceReport make_report(const SystemModel& model, const BumpSpec& spec, double A,
                        const TraceOptions& options, cplx geometric, const SpectralSum& spectral) {
    TraceReport r;
    r.geometric_side = geometric;
    r.spectral_side = spectral.value;
    r.strip_depth = A;
    r.spectral_tail_bound = spectral.tail_bound;
    r.residual = geometric - spectral.value;
    r.shape_constant = options.shape_constant;
    r.shape_epsilon = options.shape_epsilon;
    r.dimension = options.dimension.value_or(model.ambient_dimension);
    r.bound_shape_value = bound_shape(r.shape_constant, spec.l, spec.d, A, r.shape_epsilon,
                                      r.dimension);
    r.l = spec.l;
    r.d = spec.d;
    r.re_cutoff = options.re_cutoff;
    r.spectral_terms = spectral.terms;
    r.summation_floor = -A;
    return r;
}

} // namespace

void BumpSpec::validate() const {
    if (!(l > 0.0 && l < 1.0 && d > l) || !std::isfinite(d)) {
        std::ostringstream os;
        os << "bump needs 0 < l < 1 and d > l, got l = " << l << ", d = " << d;
        throw Error(ErrorKind::Validation, os.str());
    }
    if (quadrature_order < 2) {
        throw Error(ErrorKind::Validation, "quadrature_order must be at least 2");
    }
}

double bump_unit(double x) noexcept {
    const double u = 1.0 - x * x;
    if (u <= 0.0) {
        return 0.0;
    }
    return std::exp(1.0 - 1.0 / u);
}

double bump_value(const BumpSpec& spec, double t) noexcept {
    return bump_unit((t - spec.d) / spec.l);
}

double bump_accuracy_limit(const BumpSpec& spec) noexcept { return 50.0 / spec.l; }

cplx bump_fourier(const BumpSpec& spec, cplx mu) {
    check_domain(spec, mu);
    const BumpRule rule = bump_rule(spec, effective_order(spec, std::abs(mu)));
    cplx sum{};
    for (std::size_t j = 0; j < rule.t.size(); ++j) {
        sum += rule.weight[j] * std::exp(-kI * mu * rule.t[j]);
    }
    return sum;
}

double bump_derivative_norm(int order) {
    static std::mutex mutex;
    static std::map<int, double> cache;
    const std::lock_guard lock(mutex);
    if (const auto it = cache.find(order); it != cache.end()) {
        return it->second;
    }
    // On each interval between sign changes of phi^(N) the integral of |phi^(N)|
    // is |Delta phi^(N-1)|. phi^(N) has parity (-1)^N, so work on [0, 1] and double.
    double total = 0.0;
    if (order == 0) {
        total = 0.5 * kBumpMass;
    } else {
        constexpr int kGrid = 20000;
        double prev_x = 0.0;
        double prev_f = bump_derivative(order, 0.0);
        double anchor = bump_derivative(order - 1, 0.0);
        for (int i = 1; i <= kGrid; ++i) {
            const double x = static_cast<double>(i) / kGrid;
            const double f = bump_derivative(order, x);
            if ((prev_f < 0.0 && f > 0.0) || (prev_f > 0.0 && f < 0.0)) {
                double a = prev_x;
                double b = x;
                for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                    const double m = 0.5 * (a + b);
                    const double fm = bump_derivative(order, m);
                    if ((fm < 0.0) == (prev_f < 0.0)) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                const double value = bump_derivative(order - 1, 0.5 * (a + b));
                total += std::abs(value - anchor);
                anchor = value;
            }
            if (f != 0.0) {
                prev_x = x;
                prev_f = f;
            }
        }
        total += std::abs(anchor); // phi^(N-1)(1) = 0
    }
    cache[order] = 2.0 * total;
    return 2.0 * total;
}

cplx geometric_side(const PeriodicOrbitData& data, const BumpSpec& spec) {
    spec.validate();
    if (data.horizon < spec.d + spec.l) {
        std::ostringstream os;
        os << "orbit data cover periods up to " << data.horizon << " but the bump reaches "
           << spec.d + spec.l;
        throw Error(ErrorKind::HorizonTooShort, os.str());
    }
    cplx sum{};
    for (const PeriodClass& c : data.period_classes) {
        if (std::abs(c.total_period - spec.d) < spec.l) {
            sum += c.geometric_weight * bump_value(spec, c.total_period);
        }
    }
    return sum;
}

cplx fixed_point_geometric_term(const FixedPointDatum& fp, const BumpSpec& spec) {
    validate(fp);
    spec.validate();
    const double sign = (fp.stable_count % 2 == 0) ? 1.0 : -1.0;
    const GaussLegendreRule& gl = gauss_legendre(std::max(spec.quadrature_order, 200));
    cplx sum{};
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        const double t = spec.d + spec.l * gl.nodes[j];
        const double phi = bump_unit(gl.nodes[j]);
        if (phi == 0.0) {
            continue;
        }
        cplx numer{};
        for (const cplx mu : fp.weight_generator_eigenvalues) {
            numer += std::exp(-mu * t);
        }
        cplx denom{1.0, 0.0};
        for (const cplx lam : fp.generator_eigenvalues) {
            denom *= 1.0 - std::exp(-lam * t);
        }
        sum += gl.weights[j] * phi * sign * numer / denom;
    }
    return spec.l * sum;
}

SpectralSum spectral_side(const std::vector<Resonance>& resonances, const BumpSpec& spec,
                          double A, double re_cutoff) {
    spec.validate();
    std::vector<Resonance> kept;
    SpectralSum out;
    const int n = kIntegrationByPartsOrder;
    for (const Resonance& r : resonances) {
        if (!(r.value.imag() > -A)) {
            continue;
        }
        if (std::abs(r.value.real()) <= re_cutoff) {
            kept.push_back(r);
        } else {
            out.tail_bound += r.multiplicity * ibp_prefactor(spec, r.value.imag()) *
                              std::pow(std::abs(r.value), -n);
        }
    }
    std::sort(kept.begin(), kept.end(), [](const Resonance& a, const Resonance& b) {
        const double ra = std::abs(a.value.real());
        const double rb = std::abs(b.value.real());
        if (ra != rb) {
            return ra > rb;
        }
        return a.value.imag() < b.value.imag();
    });
    std::vector<cplx> values(kept.size());
    parallel_for(kept.size(), [&](std::size_t i) {
        values[i] = static_cast<double>(kept[i].multiplicity) * bump_fourier(spec, kept[i].value);
    });
    for (const cplx v : values) {
        out.value += v;
    }
    out.terms = kept.size();
    return out;
}

SpectralSum spectral_side(const std::vector<LatticeLine>& lines, const BumpSpec& spec, double A,
                          double re_cutoff) {
    spec.validate();
    std::vector<LatticeLine> kept;
    for (const LatticeLine& l : lines) {
        if (l.offset.imag() > -A) {
            kept.push_back(l);
        }
    }
    std::vector<LineSum> sums(kept.size());
    parallel_for(kept.size(), [&](std::size_t i) { sums[i] = sum_line(kept[i], spec, re_cutoff); });
    // Fixed reduction order: deepest lines first.
    std::vector<std::size_t> order(kept.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return kept[a].offset.imag() < kept[b].offset.imag();
    });
    SpectralSum out;
    for (const std::size_t i : order) {
        out.value += sums[i].value;
        out.tail_bound += sums[i].tail;
        out.terms += sums[i].terms;
    }
    return out;
}

double bound_shape(double C, double l, double d, double A, double epsilon, int n) {
    if (std::isinf(A) && A > 0) {
        return 0.0;
    }
    return C * std::pow(l, -2.0 * n - 2.0) * std::exp((d - l) * (-A + epsilon));
}

TraceReport trace_check(const SystemModel& model, const BumpSpec& spec, double A,
                        const TraceOptions& options) {
    spec.validate();
    if (!(A > 0.0)) {
        throw Error(ErrorKind::Validation, "strip depth A must be positive");
    }
    cplx geometric = geometric_side(model.data, spec);
    add_fixed_points(model, spec, geometric);

    // Lines deeper than 0.9 of the quadrature limit are bounded, not summed.
    const double floor = -0.9 * bump_accuracy_limit(spec);
    const double depth = std::min(A, -floor);
    const auto lines = exact_lattice_lines(model.spec, -depth);
    SpectralSum spectral = spectral_side(lines, spec, depth, options.re_cutoff);
    if (A > -floor) {
        spectral.tail_bound += deep_remainder_bound(model.spec, spec, floor);
    }
    TraceReport report = make_report(model, spec, A, options, geometric, spectral);
    report.summation_floor = -depth;
    return report;
}

TraceReport trace_check(const SystemModel& model, const std::vector<Resonance>& resonances,
                        const BumpSpec& spec, double A, const TraceOptions& options) {
    spec.validate();
    cplx geometric = geometric_side(model.data, spec);
    add_fixed_points(model, spec, geometric);
    const SpectralSum spectral = spectral_side(resonances, spec, A, options.re_cutoff);
    return make_report(model, spec, A, options, geometric, spectral);
}

} // namespace reslab
