#include "reslab/systems.hpp"

#include "reslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace reslab {

namespace {

using BigMatrix = std::array<std::array<BigInt, 2>, 2>;

BigMatrix to_big(const IntMatrix2& m) {
    return {{{BigInt(m[0][0]), BigInt(m[0][1])}, {BigInt(m[1][0]), BigInt(m[1][1])}}};
}

BigMatrix multiply(const BigMatrix& a, const BigMatrix& b) {
    BigMatrix c;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    return c;
}

BigMatrix power(BigMatrix base, int p) {
    BigMatrix result{{{BigInt(1), BigInt(0)}, {BigInt(0), BigInt(1)}}};
    while (p > 0) {
        if (p & 1) {
            result = multiply(result, base);
        }
        base = multiply(base, base);
        p >>= 1;
    }
    return result;
}

BigInt abs_det_minus_identity(const BigMatrix& m) {
    const BigInt det = (m[0][0] - 1) * (m[1][1] - 1) - m[0][1] * m[1][0];
    return det < 0 ? BigInt(-det) : det;
}

std::int64_t determinant(const IntMatrix2& m) {
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

BigMatrix inverse_unimodular(const IntMatrix2& m) {
    const std::int64_t det = determinant(m);
    return {{{BigInt(det * m[1][1]), BigInt(-det * m[0][1])},
             {BigInt(-det * m[1][0]), BigInt(det * m[0][0])}}};
}

int moebius(int n) {
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) {
                return 0;
            }
            result = -result;
        }
    }
    return n > 1 ? -result : result;
}

template <class CountFn>
BigInt moebius_primitive(int p, CountFn total) {
    BigInt sum = 0;
    for (int d = 1; d <= p; ++d) {
        if (p % d == 0) {
            const int mu = moebius(d);
            if (mu != 0) {
                sum += mu * total(p / d);
            }
        }
    }
    return sum / p;
}

std::string word_id(const Word& word, int symbol_count) {
    std::string id;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (symbol_count > 10 && i > 0) {
            id += '.';
        }
        id += std::to_string(word[i]);
    }
    return id;
}

// Period classes from (total_period, weight) pairs, merging equal periods.
std::vector<PeriodClass> aggregate(std::vector<PeriodClass> terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const PeriodClass& a, const PeriodClass& b) {
        return a.total_period < b.total_period;
    });
    std::vector<PeriodClass> classes;
    for (const PeriodClass& t : terms) {
        if (!classes.empty() &&
            std::abs(t.total_period - classes.back().total_period) <= 1e-12 * t.total_period) {
            classes.back().geometric_weight += t.geometric_weight;
        } else {
            classes.push_back(t);
        }
    }
    return classes;
}

void check_roof(double roof) {
    if (!(roof > 0.0) || !std::isfinite(roof)) {
        throw Error(ErrorKind::Validation, "roof must be positive and finite");
    }
}

} // namespace

// --- toral -----------------------------------------------------------------

void validate(const ToralSuspension& spec) {
    check_roof(spec.roof);
    const std::int64_t det = determinant(spec.matrix);
    if (det != 1 && det != -1) {
        throw Error(ErrorKind::Validation, "toral matrix must have |det| = 1, got det = " +
                                               std::to_string(det));
    }
    const std::int64_t trace = spec.matrix[0][0] + spec.matrix[1][1];
    // Eigenvalues (t +- sqrt(t^2 - 4 det))/2 are off the unit circle iff
    // |t| > 2 (det = 1) or t != 0 (det = -1).
    const bool hyperbolic = det == 1 ? std::abs(trace) > 2 : trace != 0;
    if (!hyperbolic) {
        throw Error(ErrorKind::NotHyperbolic,
                    "toral matrix with trace " + std::to_string(trace) + " and det " +
                        std::to_string(det) + " has eigenvalues on the unit circle");
    }
}

BigInt toral_fixed_point_count(const IntMatrix2& matrix, int p) {
    validate(ToralSuspension{matrix, 1.0});
    if (p < 1) {
        throw Error(ErrorKind::Validation, "period must be positive");
    }
    return abs_det_minus_identity(power(to_big(matrix), p));
}

BigInt toral_primitive_orbit_count(const IntMatrix2& matrix, int p) {
    return moebius_primitive(p, [&](int q) { return toral_fixed_point_count(matrix, q); });
}

PeriodicOrbitData toral_suspension_period_classes(const ToralSuspension& spec, int max_multiple) {
    validate(spec);
    if (max_multiple < 1) {
        throw Error(ErrorKind::Validation, "max_multiple must be positive");
    }
    const BigMatrix forward = to_big(spec.matrix);
    const BigMatrix backward = inverse_unimodular(spec.matrix);

    const double trace = static_cast<double>(spec.matrix[0][0] + spec.matrix[1][1]);
    const double det = static_cast<double>(determinant(spec.matrix));
    const double disc = std::sqrt(trace * trace - 4.0 * det);
    const double lam_a = 0.5 * (trace + std::copysign(disc, trace)); // |lam_a| > 1
    const double lam_b = det / lam_a;

    PeriodicOrbitData data;
    std::vector<OrbitFamily> families;
    std::vector<BigInt> counts(static_cast<std::size_t>(max_multiple) + 1);
    for (int p = 1; p <= max_multiple; ++p) {
        counts[p] = abs_det_minus_identity(power(forward, p));
        // Fixed points of phi^p over |det(I - d phi^{-p})|, both exact integers.
        const BigInt denom = abs_det_minus_identity(power(backward, p));
        const double trace_p = static_cast<double>(counts[p]) / static_cast<double>(denom);
        data.period_classes.push_back({p * spec.roof, cplx{spec.roof * trace_p, 0.0}});
    }
    for (int p = 1; p <= max_multiple; ++p) {
        const BigInt primitive = moebius_primitive(p, [&](int q) { return counts[q]; });
        if (primitive == 0) {
            continue;
        }
        PrimitiveOrbit orbit;
        orbit.id = "p" + std::to_string(p);
        orbit.primitive_period = p * spec.roof;
        orbit.backward_poincare_eigenvalues = {eigen_power(cplx{1.0 / lam_a, 0.0}, p),
                                               eigen_power(cplx{1.0 / lam_b, 0.0}, p)};
        orbit.stable_count = 1;
        orbit.stable_orientable =
            spectral_orientation_index(orbit.backward_poincare_eigenvalues) == 0;
        families.push_back({std::move(orbit), static_cast<double>(primitive)});
    }
    data.primitive_orbits = std::move(families);
    data.horizon = max_multiple * spec.roof;
    data.primitive_horizon = data.horizon;
    data.product_lines = std::vector<ZetaLine>{{cplx{1.0, 0.0}, spec.roof, 1}};
    return data;
}

// --- horseshoe -------------------------------------------------------------

double HorseshoeSuspension::weight_sum() const noexcept {
    return std::accumulate(symbol_weights.begin(), symbol_weights.end(), 0.0);
}

void validate(const HorseshoeSuspension& spec) {
    check_roof(spec.roof);
    if (spec.symbol_count < 2) {
        throw Error(ErrorKind::Validation, "horseshoe needs at least 2 symbols");
    }
    if (static_cast<int>(spec.symbol_weights.size()) != spec.symbol_count) {
        throw Error(ErrorKind::Validation, "symbol_weights must have symbol_count entries");
    }
    for (double g : spec.symbol_weights) {
        if (!std::isfinite(g)) {
            throw Error(ErrorKind::Validation, "symbol weights must be finite");
        }
    }
    if (!(spec.expansion > 1.0) || !(spec.contraction > 0.0 && spec.contraction < 1.0)) {
        throw Error(ErrorKind::Validation, "need expansion > 1 and contraction in (0,1)");
    }
    if (std::log(spec.expansion) < kHyperbolicityTolerance ||
        -std::log(spec.contraction) < kHyperbolicityTolerance) {
        throw Error(ErrorKind::NotHyperbolic, "horseshoe rates within tolerance of 1");
    }
}

std::vector<Word> lyndon_words(int symbol_count, int max_length) {
    std::vector<Word> words;
    if (symbol_count < 1 || max_length < 1) {
        return words;
    }
    // Duval's successor rule; yields every Lyndon word of length <= max_length.
    Word w{-1};
    while (!w.empty()) {
        ++w.back();
        words.push_back(w);
        const std::size_t m = w.size();
        while (static_cast<int>(w.size()) < max_length) {
            w.push_back(w[w.size() - m]);
        }
        while (!w.empty() && w.back() == symbol_count - 1) {
            w.pop_back();
        }
    }
    std::stable_sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return words;
}

BigInt necklace_count(int symbol_count, int length) {
    return moebius_primitive(length, [&](int q) {
        BigInt r = 1;
        for (int i = 0; i < q; ++i) {
            r *= symbol_count;
        }
        return r;
    });
}

PrimitiveOrbit horseshoe_cycle_orbit(const HorseshoeSuspension& spec, const Word& word) {
    const int len = static_cast<int>(word.size());
    PrimitiveOrbit orbit;
    orbit.id = word_id(word, spec.symbol_count);
    orbit.primitive_period = len * spec.roof;
    // Backward map: the contracting direction expands, the expanding one contracts.
    orbit.backward_poincare_eigenvalues = {cplx{std::pow(spec.contraction, -len), 0.0},
                                           cplx{std::pow(spec.expansion, -len), 0.0}};
    orbit.stable_count = 1;
    orbit.stable_orientable = true;
    double weight = 1.0;
    for (int symbol : word) {
        weight *= spec.symbol_weights.at(static_cast<std::size_t>(symbol));
    }
    orbit.weight_eigenvalues = {cplx{weight, 0.0}};
    return orbit;
}

PeriodicOrbitData horseshoe_orbits(const HorseshoeSuspension& spec, int max_word_length) {
    validate(spec);
    PeriodicOrbitData data;
    std::vector<OrbitFamily> families;
    std::map<int, cplx> by_length;
    for (const Word& w : lyndon_words(spec.symbol_count, max_word_length)) {
        PrimitiveOrbit orbit = horseshoe_cycle_orbit(spec, w);
        const int len = static_cast<int>(w.size());
        for (int n = 1; n * len <= max_word_length; ++n) {
            by_length[n * len] += geometric_term(orbit, n);
        }
        families.push_back({std::move(orbit), 1.0});
    }
    for (const auto& [p, weight] : by_length) {
        data.period_classes.push_back({p * spec.roof, weight});
    }
    data.primitive_orbits = std::move(families);
    data.horizon = max_word_length * spec.roof;
    data.primitive_horizon = data.horizon;
    double omitted = 0.0;
    data.product_lines = horseshoe_lines(spec, 40, &omitted);
    data.omitted_line_mass = omitted;
    return data;
}

std::vector<PeriodClass> horseshoe_period_classes(const HorseshoeSuspension& spec,
                                                  int max_multiple) {
    validate(spec);
    const double g = spec.weight_sum();
    std::vector<PeriodClass> classes;
    for (int p = 1; p <= max_multiple; ++p) {
        const double det = (1.0 - std::pow(spec.expansion, -p)) *
                           (std::pow(spec.contraction, -p) - 1.0);
        classes.push_back({p * spec.roof, cplx{spec.roof * std::pow(g, p) / det, 0.0}});
    }
    return classes;
}

std::vector<ZetaLine> horseshoe_lines(const HorseshoeSuspension& spec, int truncation,
                                      double* omitted_mass) {
    validate(spec);
    const double g = spec.weight_sum();
    std::vector<ZetaLine> lines;
    if (g == 0.0) {
        if (omitted_mass) {
            *omitted_mass = 0.0;
        }
        return lines;
    }
    std::map<double, int> grouped;
    for (int k = 0; k <= truncation; ++k) {
        for (int l = 0; l <= truncation; ++l) {
            const double r = g * std::pow(spec.contraction, l + 1) * std::pow(spec.expansion, -k);
            ++grouped[r];
        }
    }
    for (auto it = grouped.rbegin(); it != grouped.rend(); ++it) {
        lines.push_back({cplx{it->first, 0.0}, spec.roof, it->second});
    }
    std::stable_sort(lines.begin(), lines.end(), [](const ZetaLine& a, const ZetaLine& b) {
        return std::abs(a.rate) > std::abs(b.rate);
    });
    if (omitted_mass) {
        const double nu = spec.contraction;
        const double inv_mu = 1.0 / spec.expansion;
        const double full = nu / (1.0 - nu) / (1.0 - inv_mu);
        const double nk = std::pow(nu, truncation + 1);
        const double mk = std::pow(inv_mu, truncation + 1);
        *omitted_mass = std::abs(g) * full * (nk + mk - nk * mk);
    }
    return lines;
}

// --- closed orbits ---------------------------------------------------------

std::vector<ZetaLine> closed_orbit_lines(const PrimitiveOrbit& orbit, double rate_floor,
                                         double* omitted_mass) {
    validate(orbit);
    constexpr std::size_t kMaxLines = 500000;
    const auto& eigs = orbit.backward_poincare_eigenvalues;
    const std::size_t d = eigs.size();

    // Per-direction geometric ratio and the starting offset (stable k >= 1).
    std::vector<cplx> ratio(d);
    std::vector<double> tail(d + 1, 1.0); // prod_{i >= j} 1/(1 - |ratio_i|)
    cplx base_factor{orbit.orientation_index() ? -1.0 : 1.0, 0.0};
    for (std::size_t j = 0; j < d; ++j) {
        const bool stable = std::abs(eigs[j]) > 1.0;
        ratio[j] = stable ? 1.0 / eigs[j] : eigs[j];
        if (stable) {
            base_factor *= ratio[j];
        }
    }
    for (std::size_t j = d; j-- > 0;) {
        tail[j] = tail[j + 1] / (1.0 - std::abs(ratio[j]));
    }

    std::vector<ZetaLine> lines;
    double omitted = 0.0;
    std::function<void(std::size_t, cplx)> expand = [&](std::size_t j, cplx r) {
        if (j == d) {
            if (lines.size() >= kMaxLines) {
                throw Error(ErrorKind::Validation,
                            "'" + orbit.id + "': product expansion exceeds " +
                                std::to_string(kMaxLines) + " lines; raise the rate floor");
            }
            lines.push_back({r, orbit.primitive_period, 1});
            return;
        }
        for (cplx rk = r;; rk *= ratio[j]) {
            if (std::abs(rk) < rate_floor) {
                omitted += std::abs(rk) * tail[j];
                break;
            }
            expand(j + 1, rk);
        }
    };
    for (const cplx a : orbit.weight_eigenvalues) {
        if (a == cplx{}) {
            continue;
        }
        expand(0, a * base_factor);
    }
    if (omitted_mass) {
        *omitted_mass += omitted;
    }
    return lines;
}

PeriodicOrbitData orbit_list_data(const std::vector<PrimitiveOrbit>& orbits, double horizon,
                                  double rate_floor) {
    PeriodicOrbitData data;
    std::vector<PeriodClass> terms;
    std::vector<OrbitFamily> families;
    std::vector<ZetaLine> lines;
    double omitted = 0.0;
    for (const PrimitiveOrbit& orbit : orbits) {
        validate(orbit);
        for (int n = 1; n * orbit.primitive_period <= horizon * (1.0 + 1e-12); ++n) {
            terms.push_back({n * orbit.primitive_period, geometric_term(orbit, n)});
        }
        auto orbit_lines = closed_orbit_lines(orbit, rate_floor, &omitted);
        lines.insert(lines.end(), orbit_lines.begin(), orbit_lines.end());
        families.push_back({orbit, 1.0});
    }
    std::stable_sort(families.begin(), families.end(),
                     [](const OrbitFamily& a, const OrbitFamily& b) {
                         if (a.orbit.primitive_period != b.orbit.primitive_period) {
                             return a.orbit.primitive_period < b.orbit.primitive_period;
                         }
                         return a.orbit.id < b.orbit.id;
                     });
    data.period_classes = aggregate(std::move(terms));
    data.primitive_orbits = std::move(families);
    data.horizon = horizon;
    data.primitive_horizon = horizon;
    data.product_lines = std::move(lines);
    data.omitted_line_mass = omitted;
    return data;
}

MorseSmaleAssembly assemble_morse_smale(const MorseSmale& spec, double horizon,
                                        double rate_floor) {
    for (const FixedPointDatum& fp : spec.fixed_points) {
        validate(fp);
    }
    MorseSmaleAssembly out;
    out.orbits = orbit_list_data(spec.closed_orbits, horizon, rate_floor);
    out.fixed_points = spec.fixed_points;
    return out;
}

// --- whole system ----------------------------------------------------------

void validate(const SystemSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MorseSmale>) {
                for (const auto& o : s.closed_orbits) {
                    validate(o);
                }
                for (const auto& f : s.fixed_points) {
                    validate(f);
                }
            } else if constexpr (std::is_same_v<T, ExplicitOrbits>) {
                for (const auto& o : s.orbits) {
                    validate(o);
                }
            } else {
                validate(s);
            }
        },
        spec);
}

namespace {

double shortest_period(const std::vector<PrimitiveOrbit>& orbits) {
    double t = 0.0;
    for (const auto& o : orbits) {
        t = (t == 0.0) ? o.primitive_period : std::min(t, o.primitive_period);
    }
    return t == 0.0 ? 1.0 : t;
}

int orbit_ambient_dimension(const std::vector<PrimitiveOrbit>& orbits,
                            const std::vector<FixedPointDatum>& fixed_points) {
    std::size_t n = 0;
    for (const auto& o : orbits) {
        n = std::max(n, 1 + o.transverse_dimension());
    }
    for (const auto& f : fixed_points) {
        n = std::max(n, f.generator_eigenvalues.size());
    }
    return n == 0 ? 3 : static_cast<int>(n);
}

} // namespace

SystemModel build_model(const SystemSpec& spec, const BuildOptions& options) {
    validate(spec);
    SystemModel model;
    model.spec = spec;
    const int multiples = options.horizon_multiples;
    if (multiples < 1) {
        throw Error(ErrorKind::Validation, "horizon must cover at least one period");
    }
    if (const auto* toral = std::get_if<ToralSuspension>(&spec)) {
        model.data = toral_suspension_period_classes(*toral, multiples);
        model.roof = toral->roof;
        model.ambient_dimension = 3;
    } else if (const auto* hs = std::get_if<HorseshoeSuspension>(&spec)) {
        const int words = std::min(options.max_word_length, multiples);
        model.data = horseshoe_orbits(*hs, words);
        model.data.period_classes = horseshoe_period_classes(*hs, multiples);
        model.data.horizon = multiples * hs->roof;
        double omitted = 0.0;
        model.data.product_lines = horseshoe_lines(*hs, options.line_truncation, &omitted);
        model.data.omitted_line_mass = omitted;
        model.roof = hs->roof;
        model.ambient_dimension = 3;
    } else if (const auto* ms = std::get_if<MorseSmale>(&spec)) {
        model.roof = shortest_period(ms->closed_orbits);
        auto assembly = assemble_morse_smale(*ms, multiples * model.roof, options.rate_floor);
        model.data = std::move(assembly.orbits);
        model.fixed_points = std::move(assembly.fixed_points);
        model.ambient_dimension = orbit_ambient_dimension(ms->closed_orbits, ms->fixed_points);
    } else {
        const auto& ex = std::get<ExplicitOrbits>(spec);
        model.roof = shortest_period(ex.orbits);
        model.data = orbit_list_data(ex.orbits, multiples * model.roof, options.rate_floor);
        model.ambient_dimension = orbit_ambient_dimension(ex.orbits, {});
    }
    return model;
}

} // namespace reslab
