#include "reslab/resonance.hpp"

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace reslab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxLines = 500000;

std::string describe(const WindowSpec& w) {
    std::ostringstream os;
    os << "[" << w.re_min << ", " << w.re_max << "] x [" << w.im_min << ", " << w.im_max << "]";
    return os.str();
}

std::string describe(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

} // namespace

std::string_view to_string(Provenance p) noexcept {
    return p == Provenance::ExactLattice ? "ExactLattice" : "Located";
}

bool WindowSpec::contains(cplx z, double slack) const noexcept {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
}

void WindowSpec::validate(bool bounded) const {
    if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
        std::isnan(im_max) || (bounded && !std::isfinite(im_max))) {
        throw Error(ErrorKind::Validation, "window bounds must be finite: " + describe(*this));
    }
    if (!(re_min < re_max) || !(im_min < im_max)) {
        throw Error(ErrorKind::Validation, "window needs re_min < re_max and im_min < im_max: " +
                                               describe(*this));
    }
}

std::vector<Resonance> merge_resonances(std::vector<Resonance> points, double tolerance) {
    std::sort(points.begin(), points.end(), [](const Resonance& a, const Resonance& b) {
        if (a.value.real() != b.value.real()) {
            return a.value.real() < b.value.real();
        }
        return a.value.imag() < b.value.imag();
    });
    std::vector<Resonance> merged;
    std::vector<bool> used(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (used[i]) {
            continue;
        }
        Resonance r = points[i];
        used[i] = true;
        for (std::size_t j = i + 1;
             j < points.size() && points[j].value.real() - points[i].value.real() <= tolerance;
             ++j) {
            if (!used[j] && std::abs(points[j].value - points[i].value) <= tolerance) {
                r.multiplicity += points[j].multiplicity;
                used[j] = true;
            }
        }
        merged.push_back(r);
    }
    std::sort(merged.begin(), merged.end(), [](const Resonance& a, const Resonance& b) {
        if (a.value.real() != b.value.real()) {
            return a.value.real() < b.value.real();
        }
        return a.value.imag() < b.value.imag();
    });
    return merged;
}

std::vector<Resonance> lattice_points(const std::vector<LatticeLine>& lines,
                                      const WindowSpec& window) {
    window.validate();
    const double slack = 1e-12 * std::max({1.0, std::abs(window.re_min), std::abs(window.re_max),
                                           std::abs(window.im_min)});
    std::vector<Resonance> points;
    for (const LatticeLine& line : lines) {
        const double im = line.offset.imag();
        if (im < window.im_min - slack || im > window.im_max + slack) {
            continue;
        }
        if (line.spacing == 0.0) {
            if (window.contains(line.offset, slack)) {
                points.push_back({line.offset, line.multiplicity, Provenance::ExactLattice});
            }
            continue;
        }
        const double re = line.offset.real();
        const auto first = static_cast<long long>(std::ceil((window.re_min - slack - re) / line.spacing));
        const auto last = static_cast<long long>(std::floor((window.re_max + slack - re) / line.spacing));
        for (long long n = first; n <= last; ++n) {
            const cplx z{re + static_cast<double>(n) * line.spacing, im};
            if (window.contains(z, slack)) {
                points.push_back({z, line.multiplicity, Provenance::ExactLattice});
            }
        }
    }
    return merge_resonances(std::move(points));
}

// --- exact lattices ----------------------------------------------------------

std::vector<LatticeLine> suspension_lattice_lines(const MapResonanceSet& map_res, double roof) {
    if (!(roof > 0.0)) {
        throw Error(ErrorKind::Validation, "roof must be positive");
    }
    std::vector<LatticeLine> lines;
    for (const MapResonance& m : map_res.entries) {
        if (m.value == cplx{}) {
            throw Error(ErrorKind::ZeroMapResonance,
                        "map resonance 0 has no logarithm; drop it from the set");
        }
        if (m.multiplicity < 1) {
            throw Error(ErrorKind::Validation, "map resonance multiplicity must be >= 1");
        }
        // e^{-i lambda T} = rho  <=>  lambda = (i log rho + 2 pi n) / T
        lines.push_back({kI * std::log(m.value) / roof, kTwoPi / roof, m.multiplicity});
    }
    return lines;
}

std::vector<Resonance> exact_suspension_lattice(const MapResonanceSet& map_res, double roof,
                                                const WindowSpec& window) {
    return lattice_points(suspension_lattice_lines(map_res, roof), window);
}

namespace {

// Enumerates sum_j k_j * step_j with k_j >= start_j while the real part stays
// at or above floor; every step_j has negative real part.
void enumerate_exponents(const std::vector<cplx>& steps, const std::vector<int>& starts,
                         cplx base, double floor, const std::function<void(cplx)>& emit,
                         const std::string& id) {
    std::size_t emitted = 0;
    std::function<void(std::size_t, cplx)> rec = [&](std::size_t j, cplx acc) {
        if (acc.real() < floor) {
            return;
        }
        if (j == steps.size()) {
            if (++emitted > kMaxLines) {
                throw Error(ErrorKind::Validation,
                            "'" + id + "': more than " + std::to_string(kMaxLines) +
                                " lattice lines above the floor; raise the window floor");
            }
            emit(acc);
            return;
        }
        for (cplx a = acc + static_cast<double>(starts[j]) * steps[j]; a.real() >= floor;
             a += steps[j]) {
            rec(j + 1, a);
        }
    };
    rec(0, base);
}

} // namespace

std::vector<LatticeLine> closed_orbit_lattice_lines(const PrimitiveOrbit& orbit, double im_floor) {
    validate(orbit);
    if (!std::isfinite(im_floor)) {
        throw Error(ErrorKind::Validation, "lattice floor must be finite");
    }
    const double t = orbit.primitive_period;
    // log r = log a_l + i pi eps + sum_st k lambda_j - sum_un k lambda_j,
    // lambda_j = -log e_j; each step lowers Re log r.
    std::vector<cplx> steps;
    std::vector<int> starts;
    for (const cplx e : orbit.backward_poincare_eigenvalues) {
        const bool stable = std::abs(e) > 1.0;
        steps.push_back(stable ? -std::log(e) : std::log(e));
        starts.push_back(stable ? 1 : 0);
    }
    std::vector<LatticeLine> lines;
    for (const cplx a : orbit.weight_eigenvalues) {
        if (a == cplx{}) {
            continue;
        }
        const cplx base = std::log(a) + kI * std::numbers::pi * static_cast<double>(orbit.orientation_index());
        enumerate_exponents(steps, starts, base, im_floor * t,
                            [&](cplx log_r) {
                                lines.push_back({kI * log_r / t, kTwoPi / t, 1});
                            },
                            orbit.id);
    }
    return lines;
}

std::vector<Resonance> exact_morse_smale_closed_orbit(const PrimitiveOrbit& orbit,
                                                      const WindowSpec& window) {
    window.validate();
    return lattice_points(closed_orbit_lattice_lines(orbit, window.im_min), window);
}

std::vector<LatticeLine> fixed_point_lattice_lines(const FixedPointDatum& fp, double im_floor) {
    validate(fp);
    if (!std::isfinite(im_floor)) {
        throw Error(ErrorKind::Validation, "lattice floor must be finite");
    }
    // i(-mu_l + sum_st k lambda_j - sum_un k lambda_j), k_st >= 1, k_un >= 0.
    // With w = -mu_l + ..., the point i w has imaginary part Re w.
    std::vector<cplx> steps;
    std::vector<int> starts;
    for (const cplx l : fp.generator_eigenvalues) {
        const bool stable = l.real() < 0.0;
        steps.push_back(stable ? l : -l);
        starts.push_back(stable ? 1 : 0);
    }
    std::vector<LatticeLine> lines;
    for (const cplx mu : fp.weight_generator_eigenvalues) {
        enumerate_exponents(steps, starts, -mu, im_floor,
                            [&](cplx w) { lines.push_back({kI * w, 0.0, 1}); }, fp.id);
    }
    return lines;
}

std::vector<Resonance> exact_fixed_point_lattice(const FixedPointDatum& fp,
                                                 const WindowSpec& window) {
    window.validate();
    return lattice_points(fixed_point_lattice_lines(fp, window.im_min), window);
}

std::vector<Resonance> morse_smale_union(const MorseSmale& system, const WindowSpec& window) {
    return exact_resonances(system, window);
}

MapResonanceSet suspension_map_resonances(const SystemSpec& spec, double im_floor) {
    MapResonanceSet set;
    if (const auto* toral = std::get_if<ToralSuspension>(&spec)) {
        validate(*toral);
        // Map-level trace identically 1: a single map resonance at 1.
        set.entries.push_back({cplx{1.0, 0.0}, 1});
        return set;
    }
    const auto* hs = std::get_if<HorseshoeSuspension>(&spec);
    if (!hs) {
        throw Error(ErrorKind::Validation, "map resonances exist for suspensions only");
    }
    validate(*hs);
    const double g = hs->weight_sum();
    if (g == 0.0) {
        return set;
    }
    if (!std::isfinite(im_floor)) {
        throw Error(ErrorKind::Validation, "lattice floor must be finite");
    }
    // rho_kl = g nu^(l+1) mu^(-k)
    const double floor = im_floor * hs->roof;
    const double log_nu = std::log(hs->contraction);
    const double log_mu = std::log(hs->expansion);
    std::map<double, int, std::greater<>> grouped;
    for (int l = 0;; ++l) {
        const double base = std::log(std::abs(g)) + (l + 1) * log_nu;
        if (base < floor) {
            break;
        }
        for (int k = 0; base - k * log_mu >= floor; ++k) {
            ++grouped[g * std::pow(hs->contraction, l + 1) * std::pow(hs->expansion, -k)];
            if (grouped.size() > kMaxLines) {
                throw Error(ErrorKind::Validation, "too many map resonances above the floor");
            }
        }
    }
    for (const auto& [rho, m] : grouped) {
        set.entries.push_back({cplx{rho, 0.0}, m});
    }
    std::stable_sort(set.entries.begin(), set.entries.end(),
                     [](const MapResonance& a, const MapResonance& b) {
                         return std::abs(a.value) > std::abs(b.value);
                     });
    return set;
}

std::vector<LatticeLine> exact_lattice_lines(const SystemSpec& spec, double im_floor) {
    std::vector<LatticeLine> lines;
    auto keep = [&](std::vector<LatticeLine> more) {
        for (const LatticeLine& l : more) {
            if (l.offset.imag() >= im_floor - 1e-12 * std::max(1.0, std::abs(im_floor))) {
                lines.push_back(l);
            }
        }
    };
    if (const auto* toral = std::get_if<ToralSuspension>(&spec)) {
        keep(suspension_lattice_lines(suspension_map_resonances(spec, im_floor), toral->roof));
    } else if (const auto* hs = std::get_if<HorseshoeSuspension>(&spec)) {
        keep(suspension_lattice_lines(suspension_map_resonances(spec, im_floor), hs->roof));
    } else if (const auto* ms = std::get_if<MorseSmale>(&spec)) {
        for (const auto& o : ms->closed_orbits) {
            keep(closed_orbit_lattice_lines(o, im_floor));
        }
        for (const auto& f : ms->fixed_points) {
            keep(fixed_point_lattice_lines(f, im_floor));
        }
    } else {
        for (const auto& o : std::get<ExplicitOrbits>(spec).orbits) {
            keep(closed_orbit_lattice_lines(o, im_floor));
        }
    }
    return lines;
}

std::vector<Resonance> exact_resonances(const SystemSpec& spec, const WindowSpec& window) {
    window.validate();
    return lattice_points(exact_lattice_lines(spec, window.im_min), window);
}

// --- argument principle ------------------------------------------------------

namespace {

double distance_to_segment(cplx z, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    double s = len2 > 0.0 ? ((z - a) * std::conj(d)).real() / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(z - (a + s * d));
}

// True when no zero of zeta lies within `clearance` of the segment [a, b].
// Samples the segment and polishes Newton estimates from samples near a zero.
bool segment_clear(const ZetaFunction& zeta, cplx a, cplx b, double clearance, double spacing) {
    const double len = std::abs(b - a);
    const double h_target = std::min(0.02 * spacing, 0.05);
    const int n = std::max(16, static_cast<int>(std::ceil(len / h_target)));
    const double h = len / n;
    for (int i = 0; i <= n; ++i) {
        const cplx z0 = a + (b - a) * (static_cast<double>(i) / n);
        ZetaSample s = zeta(z0);
        if (s.value == cplx{} || !std::isfinite(std::abs(s.log_derivative))) {
            return false;
        }
        if (s.log_derivative == cplx{}) {
            continue;
        }
        cplx step = -1.0 / s.log_derivative;
        if (std::abs(step) > 2.0 * h + 2.0 * clearance) {
            continue;
        }
        cplx z = z0;
        for (int it = 0; it < 60; ++it) {
            if (std::abs(step) > h) {
                step *= h / std::abs(step);
            }
            z += step;
            s = zeta(z);
            if (s.value == cplx{} || s.log_derivative == cplx{} ||
                !std::isfinite(std::abs(s.log_derivative))) {
                break;
            }
            step = -1.0 / s.log_derivative;
            if (std::abs(step) < 1e-3 * clearance) {
                break;
            }
        }
        if (distance_to_segment(z, a, b) < clearance) {
            return false;
        }
    }
    return true;
}

cplx edge_integral(const ZetaFunction& zeta, cplx a, cplx b, double tolerance) {
    const cplx d = b - a;
    const AdaptiveResult r = integrate_adaptive(
        [&](double s) { return zeta(a + s * d).log_derivative * d; }, 0.0, 1.0, tolerance, 20000);
    return r.value;
}

// Raw winding number of the rectangle, counterclockwise.
cplx rectangle_winding(const ZetaFunction& zeta, const WindowSpec& w, double winding_tolerance) {
    const cplx c00{w.re_min, w.im_min};
    const cplx c10{w.re_max, w.im_min};
    const cplx c11{w.re_max, w.im_max};
    const cplx c01{w.re_min, w.im_max};
    const double tol = kTwoPi * winding_tolerance / 4.0;
    const cplx total = edge_integral(zeta, c00, c10, tol) + edge_integral(zeta, c10, c11, tol) +
                       edge_integral(zeta, c11, c01, tol) + edge_integral(zeta, c01, c00, tol);
    return total / (kTwoPi * kI);
}

int rounded_count(cplx raw, double guard, const std::string& where) {
    const double nearest = std::round(raw.real());
    if (!(std::abs(raw - nearest) < guard)) {
        std::ostringstream os;
        os.precision(6);
        os << "winding integral " << raw.real() << (raw.imag() < 0 ? " - " : " + ")
           << std::abs(raw.imag()) << "i is not within " << guard << " of an integer on "
           << where;
        throw Error(ErrorKind::NonIntegerResidue, os.str());
    }
    return static_cast<int>(nearest);
}

int box_count(const ZetaFunction& zeta, const WindowSpec& w, const ContourOptions& options) {
    return rounded_count(rectangle_winding(zeta, w, options.winding_tolerance),
                         options.integer_guard, describe(w));
}

} // namespace

ContourCount count_zeros(const ZetaFunction& zeta, const WindowSpec& window,
                         const ContourOptions& options) {
    window.validate(true);
    ContourCount out;
    out.window = window;
    for (;;) {
        WindowSpec& w = out.window;
        const cplx c00{w.re_min, w.im_min};
        const cplx c10{w.re_max, w.im_min};
        const cplx c11{w.re_max, w.im_max};
        const cplx c01{w.re_min, w.im_max};
        const double clear = options.edge_clearance;
        const double sp = options.lattice_spacing;
        const bool bottom = segment_clear(zeta, c00, c10, clear, sp);
        const bool right = segment_clear(zeta, c10, c11, clear, sp);
        const bool top = segment_clear(zeta, c11, c01, clear, sp);
        const bool left = segment_clear(zeta, c01, c00, clear, sp);
        if (bottom && right && top && left) {
            const cplx raw = rectangle_winding(zeta, w, options.winding_tolerance);
            out.raw = raw.real();
            out.count = rounded_count(raw, options.integer_guard, describe(w));
            return out;
        }
        if (out.perturbations >= options.perturbation_attempts) {
            throw Error(ErrorKind::ContourTooClose,
                        "a zero stays within " + std::to_string(clear) + " of the contour " +
                            describe(w) + " after " + std::to_string(out.perturbations) +
                            " outward perturbations");
        }
        const double shift = 0.37 * sp;
        if (!bottom) {
            w.im_min -= shift;
        }
        if (!top) {
            w.im_max += shift;
        }
        if (!left) {
            w.re_min -= shift;
        }
        if (!right) {
            w.re_max += shift;
        }
        ++out.perturbations;
    }
}

int count_zeros_argument_principle(const ZetaFunction& zeta, const WindowSpec& window,
                                   const ContourOptions& options) {
    return count_zeros(zeta, window, options).count;
}

double circle_winding(const ZetaFunction& zeta, cplx center, double radius, double tolerance) {
    const AdaptiveResult r = integrate_adaptive(
        [&](double theta) {
            const cplx e = std::polar(1.0, theta);
            return zeta(center + radius * e).log_derivative * (kI * radius * e);
        },
        0.0, kTwoPi, kTwoPi * tolerance, 4000);
    return (r.value / (kTwoPi * kI)).real();
}

Resonance refine_newton(const ZetaFunction& zeta, cplx seed, const NewtonOptions& options) {
    cplx z = seed;
    ZetaSample s = zeta(z);
    for (int it = 0; it < options.max_iterations; ++it) {
        if (s.value == cplx{}) {
            break;
        }
        if (s.log_derivative == cplx{} || !std::isfinite(std::abs(s.log_derivative))) {
            throw Error(ErrorKind::NoConvergence,
                        "Newton step undefined at " + describe(z) + " (zeta'/zeta vanishes)");
        }
        const cplx step = -1.0 / s.log_derivative;
        double damp = std::min(1.0, options.max_step / std::abs(step));
        cplx next = z + damp * step;
        ZetaSample sn = zeta(next);
        for (int halving = 0; halving < 10 && std::abs(sn.value) > std::abs(s.value); ++halving) {
            damp *= 0.5;
            next = z + damp * step;
            sn = zeta(next);
        }
        z = next;
        s = sn;
        if (std::abs(z - seed) > options.trust_radius) {
            throw Error(ErrorKind::NoConvergence, "Newton iterate left the trust region around " +
                                                      describe(seed));
        }
        if (std::abs(s.value) < options.tolerance && std::abs(step) < options.tolerance) {
            break;
        }
        if (it + 1 == options.max_iterations) {
            throw Error(ErrorKind::NoConvergence,
                        "no convergence after " + std::to_string(options.max_iterations) +
                            " Newton iterations from " + describe(seed));
        }
    }
    const double radius = std::max(1000.0 * options.tolerance, 1e-8);
    const double winding = circle_winding(zeta, z, radius);
    const double m = std::round(winding);
    if (m < 1.0 || std::abs(winding - m) > 0.1) {
        throw Error(ErrorKind::NoConvergence,
                    "refined point " + describe(z) + " encloses no zero (winding " +
                        std::to_string(winding) + ")");
    }
    return {z, static_cast<int>(m), Provenance::Located};
}

namespace {

struct Locator {
    const ZetaFunction& zeta;
    const LocateOptions& options;

    static constexpr double kFractions[] = {0.5, 0.37, 0.63, 0.29, 0.71};

    // Cuts box along its longer side at a clear position; returns the two halves.
    std::pair<WindowSpec, WindowSpec> split(const WindowSpec& box) const {
        const bool vertical_cut = box.width() >= box.height();
        for (double f : kFractions) {
            WindowSpec lo = box;
            WindowSpec hi = box;
            if (vertical_cut) {
                const double x = box.re_min + f * box.width();
                if (!segment_clear(zeta, {x, box.im_min}, {x, box.im_max},
                                   options.contour.edge_clearance,
                                   options.contour.lattice_spacing)) {
                    continue;
                }
                lo.re_max = x;
                hi.re_min = x;
            } else {
                const double y = box.im_min + f * box.height();
                if (!segment_clear(zeta, {box.re_min, y}, {box.re_max, y},
                                   options.contour.edge_clearance,
                                   options.contour.lattice_spacing)) {
                    continue;
                }
                lo.im_max = y;
                hi.im_min = y;
            }
            return {lo, hi};
        }
        throw Error(ErrorKind::ContourTooClose,
                    "no clear cut through box " + describe(box) + "; zeros crowd every candidate");
    }

    void resolve(const WindowSpec& box, int count, std::vector<Resonance>& out) const {
        if (count == 0) {
            return;
        }
        const double diameter = std::hypot(box.width(), box.height());
        if (diameter <= options.seed_diameter) {
            const cplx center{0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
            NewtonOptions newton = options.newton;
            newton.trust_radius = std::min(newton.trust_radius, 4.0 * diameter);
            newton.max_step = std::min(newton.max_step, diameter);
            try {
                Resonance r = refine_newton(zeta, center, newton);
                if (box.contains(r.value, 1e-12) && r.multiplicity == count) {
                    out.push_back(r);
                    return;
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoConvergence) {
                    throw;
                }
            }
            if (diameter < 1e-4 * options.seed_diameter) {
                throw Error(ErrorKind::CountMismatch,
                            "could not resolve " + std::to_string(count) + " zero(s) in box " +
                                describe(box));
            }
        }
        const auto [lo, hi] = split(box);
        const int c_lo = box_count(zeta, lo, options.contour);
        const int c_hi = box_count(zeta, hi, options.contour);
        if (c_lo + c_hi != count || c_lo < 0 || c_hi < 0) {
            throw Error(ErrorKind::CountMismatch,
                        "sub-box counts " + std::to_string(c_lo) + " + " + std::to_string(c_hi) +
                            " do not add up to " + std::to_string(count) + " for " +
                            describe(box));
        }
        resolve(lo, c_lo, out);
        resolve(hi, c_hi, out);
    }

    // Cut positions of an n-piece partition of [a, b], nudged off zeros.
    std::vector<double> cuts(double a, double b, int n, bool vertical, const WindowSpec& w) const {
        std::vector<double> pos{a};
        const double step = (b - a) / n;
        for (int j = 1; j < n; ++j) {
            bool placed = false;
            for (double off : {0.0, 0.11, -0.11, 0.23, -0.23, 0.31, -0.31}) {
                const double x = a + (j + off) * step;
                const bool clear =
                    vertical ? segment_clear(zeta, {x, w.im_min}, {x, w.im_max},
                                             options.contour.edge_clearance,
                                             options.contour.lattice_spacing)
                             : segment_clear(zeta, {w.re_min, x}, {w.re_max, x},
                                             options.contour.edge_clearance,
                                             options.contour.lattice_spacing);
                if (clear) {
                    pos.push_back(x);
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                throw Error(ErrorKind::ContourTooClose,
                            "no clear grid line near " + std::to_string(a + j * step));
            }
        }
        pos.push_back(b);
        return pos;
    }
};

} // namespace

LocateResult locate_resonances(const ZetaFunction& zeta, const WindowSpec& window,
                               const LocateOptions& options) {
    LocateResult result;
    const ContourCount total = count_zeros(zeta, window, options.contour);
    result.window = total.window;
    result.total_count = total.count;
    if (total.count == 0) {
        return result;
    }
    const WindowSpec& w = total.window;
    const double side = options.max_box_side > 0.0 ? options.max_box_side
                                                   : 0.5 * options.contour.lattice_spacing;
    const int nx = std::max(1, static_cast<int>(std::ceil(w.width() / side)));
    const int ny = std::max(1, static_cast<int>(std::ceil(w.height() / side)));
    const Locator locator{zeta, options};
    const auto xs = locator.cuts(w.re_min, w.re_max, nx, true, w);
    const auto ys = locator.cuts(w.im_min, w.im_max, ny, false, w);

    std::vector<WindowSpec> boxes;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            boxes.push_back({xs[i], xs[i + 1], ys[j], ys[j + 1]});
        }
    }
    std::vector<int> counts(boxes.size(), 0);
    parallel_for(boxes.size(),
                 [&](std::size_t b) { counts[b] = box_count(zeta, boxes[b], options.contour); });
    int sum = 0;
    for (int c : counts) {
        sum += c;
    }
    if (sum != total.count) {
        throw Error(ErrorKind::CountMismatch,
                    "box counts sum to " + std::to_string(sum) + " but the window holds " +
                        std::to_string(total.count));
    }
    std::vector<std::vector<Resonance>> found(boxes.size());
    parallel_for(boxes.size(),
                 [&](std::size_t b) { locator.resolve(boxes[b], counts[b], found[b]); });
    std::vector<Resonance> all;
    for (auto& f : found) {
        all.insert(all.end(), f.begin(), f.end());
    }
    result.resonances = merge_resonances(std::move(all));
    int located = 0;
    for (const Resonance& r : result.resonances) {
        located += r.multiplicity;
    }
    if (located != total.count) {
        throw Error(ErrorKind::CountMismatch, "located multiplicity " + std::to_string(located) +
                                                  " differs from the count " +
                                                  std::to_string(total.count));
    }
    return result;
}

} // namespace reslab
