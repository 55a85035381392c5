#include "reslab/zeta.hpp"

#include "reslab/error.hpp"
#include "reslab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace reslab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();

double regression_slope(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Geometric-ratio majorant for the terms after the last one summed.
struct Tail {
    double bound = 0.0;
    bool heuristic = false;
};

Tail ratio_tail(std::span<const double> times, std::span<const double> magnitudes) {
    const std::size_t n = magnitudes.size();
    if (n == 0) {
        return {};
    }
    if (n < 2) {
        return {magnitudes.back(), true};
    }
    double rho = 0.0;
    for (std::size_t i = n / 2; i + 1 < n; ++i) {
        if (magnitudes[i] > 0.0) {
            rho = std::max(rho, magnitudes[i + 1] / magnitudes[i]);
        }
    }
    bool heuristic = false;
    if (n >= 4) {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; ++i) {
            if (magnitudes[i] > 0.0) {
                x.push_back(times[i]);
                y.push_back(std::log(magnitudes[i]));
            }
        }
        if (x.size() >= 4) {
            const double spacing = (times[n - 1] - times[n / 2]) /
                                   static_cast<double>(std::max<std::size_t>(1, n - 1 - n / 2));
            rho = std::max(rho, std::exp(regression_slope(x, y) * spacing));
        }
    } else {
        heuristic = true;
    }
    if (rho >= 1.0) {
        return {magnitudes.back(), true};
    }
    return {magnitudes.back() * rho / (1.0 - rho), heuristic};
}

// Bound on the terms with t > t_last from the product lines:
//   log zeta_1 = sum_lines m sum_n -(r z)^n / n,  z = e^{i lambda T}.
// derivative = true bounds the log-derivative series instead.
Tail line_tail(const PeriodicOrbitData& data, cplx lambda, double t_last, bool derivative) {
    Tail tail;
    double zmax = 0.0;
    double tmax = 0.0;
    for (const ZetaLine& line : *data.product_lines) {
        const double zmod = std::exp(-lambda.imag() * line.spacing);
        zmax = std::max(zmax, zmod);
        tmax = std::max(tmax, line.spacing);
        const double q = std::abs(line.rate) * zmod;
        if (q == 0.0) {
            continue;
        }
        if (q >= 1.0) {
            return {kInf, true};
        }
        const double next = std::floor(t_last / line.spacing * (1.0 + 1e-12)) + 1.0;
        const double lead = std::pow(q, next) / (1.0 - q);
        tail.bound += line.multiplicity * (derivative ? line.spacing * lead : lead / next);
    }
    if (data.omitted_line_mass > 0.0) {
        const double q = data.omitted_line_mass * zmax;
        if (q >= 1.0) {
            return {kInf, true};
        }
        const double steps = std::floor(t_last / std::max(tmax, 1e-300));
        const double lead = zmax * std::pow(q, steps) * data.omitted_line_mass / (1.0 - q);
        tail.bound += derivative ? tmax * lead : lead;
    }
    return tail;
}

struct SeriesResult {
    cplx sum;
    double t_last = 0.0;
    Tail tail;
};

// sum_classes w e^{i lambda t} / (divide_by_period ? t : 1), ascending t.
SeriesResult class_series(const PeriodicOrbitData& data, cplx lambda, bool divide_by_period,
                          double relative_cutoff) {
    SeriesResult result;
    std::vector<double> times;
    std::vector<double> mags;
    int growth_run = 0;
    for (const PeriodClass& c : data.period_classes) {
        cplx term = c.geometric_weight * std::exp(kI * lambda * c.total_period);
        if (divide_by_period) {
            term /= c.total_period;
        }
        const double mag = std::abs(term);
        if (!std::isfinite(mag)) {
            throw Error(ErrorKind::DivergentRegion,
                        "series term overflows at t = " + std::to_string(c.total_period));
        }
        if (!mags.empty() && mag > mags.back() * (1.0 + 1e-12)) {
            if (++growth_run >= 3) {
                std::ostringstream os;
                os << "terms grow for 3 consecutive classes near t = " << c.total_period
                   << "; lambda = (" << lambda.real() << ", " << lambda.imag()
                   << ") lies below the convergence abscissa";
                throw Error(ErrorKind::DivergentRegion, os.str());
            }
        } else {
            growth_run = 0;
        }
        result.sum += term;
        result.t_last = c.total_period;
        times.push_back(c.total_period);
        mags.push_back(mag);
        if (mags.size() >= 4 && mag < relative_cutoff * std::abs(result.sum)) {
            break;
        }
    }
    if (mags.empty()) {
        return result;
    }
    if (data.product_lines) {
        result.tail = line_tail(data, lambda, result.t_last, !divide_by_period);
    } else {
        result.tail = ratio_tail(times, mags);
    }
    return result;
}

bool use_product(const PeriodicOrbitData& data, cplx lambda, const ZetaOptions& options) {
    switch (options.method) {
    case ZetaMethod::Series:
        return false;
    case ZetaMethod::Product:
        if (!data.product_lines) {
            throw Error(ErrorKind::Validation, "no product representation for this system");
        }
        return true;
    case ZetaMethod::Auto:
        break;
    }
    if (!data.product_lines) {
        return false;
    }
    if (data.period_classes.size() < 4) {
        return true;
    }
    return lambda.imag() <= abscissa_estimate(data) + options.continuation_margin;
}

// Bound on |log zeta_full - log zeta_kept| from the dropped lines.
Tail omitted_line_tail(const PeriodicOrbitData& data, cplx lambda, bool derivative) {
    if (data.omitted_line_mass <= 0.0) {
        return {};
    }
    double zmax = 0.0;
    double tmax = 0.0;
    for (const ZetaLine& line : *data.product_lines) {
        zmax = std::max(zmax, std::exp(-lambda.imag() * line.spacing));
        tmax = std::max(tmax, line.spacing);
    }
    const double q = data.omitted_line_mass * zmax;
    if (q >= 1.0) {
        return {kInf, true};
    }
    return {(derivative ? tmax : 1.0) * q / (1.0 - q), false};
}

} // namespace

double abscissa_estimate(const PeriodicOrbitData& data) {
    std::vector<double> t;
    std::vector<double> y;
    for (const PeriodClass& c : data.period_classes) {
        const double w = std::abs(c.geometric_weight);
        if (w > 0.0 && std::isfinite(std::log(w))) {
            t.push_back(c.total_period);
            y.push_back(std::log(w));
        }
    }
    if (t.size() < 4) {
        throw Error(ErrorKind::InsufficientData,
                    "abscissa estimate needs at least 4 period classes with nonzero weight, got " +
                        std::to_string(t.size()));
    }
    return regression_slope(t, y);
}

ZetaEvaluation zeta1_log_derivative(const PeriodicOrbitData& data, cplx lambda,
                                    const ZetaOptions& options) {
    ZetaEvaluation out;
    if (use_product(data, lambda, options)) {
        const ProductForm form(*data.product_lines);
        out.value = form(lambda).log_derivative;
        const Tail tail = omitted_line_tail(data, lambda, true);
        out.truncation_horizon = kInf;
        out.tail_bound = tail.bound;
        out.heuristic = tail.heuristic;
        out.method = ZetaMethod::Product;
        return out;
    }
    const SeriesResult s = class_series(data, lambda, false, options.relative_cutoff);
    out.value = s.sum / kI;
    out.truncation_horizon = s.t_last;
    out.tail_bound = s.tail.bound;
    out.heuristic = s.tail.heuristic;
    out.method = ZetaMethod::Series;
    return out;
}

ZetaEvaluation zeta1(const PeriodicOrbitData& data, cplx lambda, const ZetaOptions& options) {
    ZetaEvaluation out;
    Tail exponent_tail;
    if (use_product(data, lambda, options)) {
        const ProductForm form(*data.product_lines);
        out.value = form(lambda).value;
        exponent_tail = omitted_line_tail(data, lambda, false);
        out.truncation_horizon = kInf;
        out.method = ZetaMethod::Product;
    } else {
        const SeriesResult s = class_series(data, lambda, true, options.relative_cutoff);
        out.value = std::exp(-s.sum);
        exponent_tail = s.tail;
        out.truncation_horizon = s.t_last;
        out.method = ZetaMethod::Series;
    }
    out.heuristic = exponent_tail.heuristic;
    out.tail_bound = std::isfinite(exponent_tail.bound)
                         ? std::abs(out.value) * std::expm1(exponent_tail.bound)
                         : kInf;
    return out;
}

ZetaEvaluation ruelle_zeta(const PeriodicOrbitData& data, cplx lambda,
                           std::optional<double> horizon) {
    if (!data.primitive_orbits) {
        throw Error(ErrorKind::MissingPrimitiveData,
                    "Ruelle zeta needs primitive orbits; this data carries period classes only");
    }
    const double limit = horizon.value_or(data.primitive_horizon) * (1.0 + 1e-12);
    cplx log_value{};
    bool zero = false;
    std::vector<double> times;
    std::vector<double> mags;
    double t_last = 0.0;
    for (const OrbitFamily& family : *data.primitive_orbits) {
        const double period = family.orbit.primitive_period;
        if (period > limit) {
            break;
        }
        const cplx x = std::exp(-lambda * period);
        const cplx factor = 1.0 - x;
        if (factor == cplx{}) {
            zero = true;
        } else {
            log_value += family.count * std::log(factor);
        }
        const double mag = family.count * std::abs(x);
        if (!times.empty() && period == times.back()) {
            mags.back() += mag;
        } else {
            times.push_back(period);
            mags.push_back(mag);
        }
        t_last = period;
    }
    bool growing = false;
    if (mags.size() >= 4) {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < mags.size(); ++i) {
            if (mags[i] > 0.0) {
                x.push_back(times[i]);
                y.push_back(std::log(mags[i]));
            }
        }
        growing = x.size() >= 4 && regression_slope(x, y) > 0.0;
    }
    const cplx value = zero ? cplx{} : std::exp(log_value);
    if (growing || !(std::isfinite(value.real()) && std::isfinite(value.imag()))) {
        std::ostringstream os;
        os << "Ruelle product overflows at lambda = (" << lambda.real() << ", " << lambda.imag()
           << "); the orbit terms grow, so Re lambda is below the abscissa";
        throw Error(ErrorKind::DivergentRegion, os.str());
    }
    ZetaEvaluation out;
    out.value = value;
    out.truncation_horizon = t_last;
    out.method = ZetaMethod::Series;
    Tail tail = ratio_tail(times, mags);
    // |log(1 - x)| <= |x| / (1 - |x|) turns the term majorant into a log bound.
    if (!mags.empty() && std::isfinite(tail.bound)) {
        const double xmax = std::exp(-lambda.real() * t_last);
        if (xmax < 1.0) {
            tail.bound /= (1.0 - xmax);
        } else {
            tail.heuristic = true;
        }
    }
    out.heuristic = tail.heuristic;
    out.tail_bound = std::isfinite(tail.bound) ? std::abs(out.value) * std::expm1(tail.bound) : kInf;
    return out;
}

cplx product_form_zeta1(std::span<const ZetaLine> lines, cplx lambda) {
    cplx value{1.0, 0.0};
    for (const ZetaLine& line : lines) {
        const cplx factor = 1.0 - line.rate * std::exp(kI * lambda * line.spacing);
        for (int m = 0; m < line.multiplicity; ++m) {
            value *= factor;
        }
    }
    return value;
}

ProductForm::ProductForm(std::span<const ZetaLine> lines) {
    double longest = 0.0;
    for (const ZetaLine& line : lines) {
        Group& g = groups_[line.spacing];
        for (int m = 0; m < line.multiplicity; ++m) {
            g.rate_re.push_back(line.rate.real());
            g.rate_im.push_back(line.rate.imag());
        }
        longest = std::max(longest, line.spacing);
    }
    lattice_spacing_ = longest > 0.0 ? 2.0 * std::numbers::pi / longest : 2.0 * std::numbers::pi;
}

ZetaSample ProductForm::operator()(cplx lambda) const {
    ZetaSample s{cplx{1.0, 0.0}, cplx{}};
    for (const auto& [spacing, group] : groups_) {
        const cplx z = std::exp(kI * lambda * spacing);
        const kernels::ProductSums sums = kernels::line_product(group.rate_re, group.rate_im, z);
        s.value *= sums.product;
        // d/dlambda log(1 - r z) = -i T r z / (1 - r z)
        s.log_derivative += -kI * spacing * sums.ratio_sum;
    }
    return s;
}

ContinuedZeta continued_zeta(const PeriodicOrbitData& data) {
    ContinuedZeta out;
    if (data.product_lines) {
        auto form = std::make_shared<const ProductForm>(*data.product_lines);
        out.lattice_spacing = form->lattice_spacing();
        out.function = [form](cplx lambda) { return (*form)(lambda); };
        return out;
    }
    double shortest = kInf;
    for (const PeriodClass& c : data.period_classes) {
        shortest = std::min(shortest, c.total_period);
    }
    out.lattice_spacing = std::isfinite(shortest) ? 2.0 * std::numbers::pi / shortest
                                                  : 2.0 * std::numbers::pi;
    const ZetaOptions series{ZetaMethod::Series};
    out.function = [data, series](cplx lambda) {
        return ZetaSample{zeta1(data, lambda, series).value,
                          zeta1_log_derivative(data, lambda, series).value};
    };
    return out;
}

} // namespace reslab
