#include "reslab/count.hpp"

#include "reslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace reslab {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorKind::Validation, "beta must be positive and finite");
    }
}

void check_complete(const ResonanceSource& source, double E, double beta) {
    const WindowSpec& w = source.complete_in;
    const double im_lo = std::max(-beta, -E);
    if (w.re_min > -E || w.re_max < E || w.im_min > im_lo || w.im_max < E) {
        std::ostringstream os;
        os << "strip |mu| <= " << E << ", Im > " << -beta
           << " is not inside the completeness window [" << w.re_min << ", " << w.re_max
           << "] x [" << w.im_min << ", " << w.im_max << "]";
        throw Error(ErrorKind::IncompleteSource, os.str());
    }
}

bool in_strip(cplx z, double E, double beta) { return z.imag() > -beta && std::abs(z) <= E; }

} // namespace

ResonanceSource exact_source(const SystemSpec& spec, double re_extent, double beta) {
    check_beta(beta);
    const WindowSpec w{-re_extent, re_extent, -beta, std::numeric_limits<double>::infinity()};
    return {exact_resonances(spec, w), w};
}

int count_in_strip(const ResonanceSource& source, double E, double beta) {
    check_beta(beta);
    if (!(E >= 0.0)) {
        throw Error(ErrorKind::Validation, "E must be nonnegative");
    }
    check_complete(source, E, beta);
    int n = 0;
    for (const Resonance& r : source.points) {
        if (in_strip(r.value, E, beta)) {
            n += r.multiplicity;
        }
    }
    return n;
}

int per_unit_max(const ResonanceSource& source, double E, double beta) {
    check_beta(beta);
    check_complete(source, E, beta);
    std::vector<std::pair<double, int>> pts;
    for (const Resonance& r : source.points) {
        if (r.value.imag() > -beta && std::abs(r.value.real()) <= E) {
            pts.emplace_back(r.value.real(), r.multiplicity);
        }
    }
    std::sort(pts.begin(), pts.end());
    // Some optimal window has its left edge on a point.
    int best = 0;
    int inside = 0;
    std::size_t hi = 0;
    for (std::size_t lo = 0; lo < pts.size(); ++lo) {
        while (hi < pts.size() && pts[hi].first <= pts[lo].first + 2.0) {
            inside += pts[hi].second;
            ++hi;
        }
        best = std::max(best, inside);
        inside -= pts[lo].second;
    }
    return best;
}

CountReport growth_fit(const ResonanceSource& source, const std::vector<double>& grid,
                       double beta) {
    check_beta(beta);
    if (grid.size() < 6) {
        throw Error(ErrorKind::InsufficientData,
                    "growth fit needs at least 6 grid points, got " + std::to_string(grid.size()));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]) || (i > 0 && grid[i] <= grid[i - 1])) {
            throw Error(ErrorKind::Validation, "E grid must be positive and increasing");
        }
    }
    CountReport report;
    report.beta = beta;
    for (const double E : grid) {
        const StripCount c{E, count_in_strip(source, E, beta), per_unit_max(source, E, beta)};
        report.per_unit_max = std::max(report.per_unit_max, c.per_unit);
        report.strip_counts.push_back(c);
    }
    if (report.strip_counts.front().count < 1) {
        throw Error(ErrorKind::InsufficientData, "no resonances counted at the smallest E");
    }
    const auto n = static_cast<double>(grid.size());
    double mx = 0.0;
    double my = 0.0;
    for (const StripCount& c : report.strip_counts) {
        mx += std::log(c.E);
        my += std::log(static_cast<double>(c.count));
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const StripCount& c : report.strip_counts) {
        const double dx = std::log(c.E) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(static_cast<double>(c.count)) - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0.0;
    for (const StripCount& c : report.strip_counts) {
        const double e = std::log(static_cast<double>(c.count)) - intercept - slope * std::log(c.E);
        ssr += e * e;
    }
    report.fitted_exponent = slope;
    report.half_width = 2.0 * std::sqrt(ssr / (n - 2.0) / sxx);
    report.prefactor = std::exp(intercept);
    return report;
}

} // namespace reslab
