#include "reslab/count.hpp"
#include "reslab/error.hpp"
#include "reslab/io.hpp"
#include "reslab/resonance.hpp"
#include "reslab/trace.hpp"
#include "reslab/zeta.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

using namespace reslab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> parse_list(const std::string& text, const std::string& flag,
                               std::size_t expected) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string field = text.substr(start, end - start);
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
        if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(x)) {
            throw Error(ErrorKind::Validation, flag + ": not a finite number '" + field + "'");
        }
        out.push_back(x);
        start = end + 1;
    }
    if (expected != 0 && out.size() != expected) {
        throw Error(ErrorKind::Validation, flag + ": expected " + std::to_string(expected) +
                                               " comma-separated numbers");
    }
    return out;
}

double parse_depth(const std::string& text) {
    if (text == "inf" || text == "infinity") {
        return kInf;
    }
    const auto v = parse_list(text, "--A", 1);
    if (!(v[0] > 0.0)) {
        throw Error(ErrorKind::Validation, "--A must be positive");
    }
    return v[0];
}

WindowSpec window_from(const std::string& flag, const ConfigDocument& doc) {
    if (flag.empty()) {
        if (!doc.window) {
            throw Error(ErrorKind::Validation, "no window: pass --window or set \"window\"");
        }
        return *doc.window;
    }
    const auto v = parse_list(flag, "--window", 4);
    WindowSpec w{v[0], v[1], v[2], v[3]};
    w.validate(true);
    return w;
}

void emit(const std::string& output, const std::string& content) {
    if (output.empty() || output == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_atomic(output, content);
    }
}

// Second artifact next to the main one, or stderr when the main one went to stdout.
void emit_sidecar(const std::string& output, const std::string& suffix,
                  const std::string& content) {
    if (output.empty() || output == "-") {
        std::cerr << content;
    } else {
        write_atomic(output + suffix, content);
    }
}

std::string method_name(ZetaMethod m) {
    switch (m) {
    case ZetaMethod::Series:
        return "series";
    case ZetaMethod::Product:
        return "product";
    default:
        return "auto";
    }
}

struct Common {
    std::string config;
    std::string output;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("config", c.config, "system configuration (JSON)")->required();
    sub->add_option("-o,--output", c.output, "output file (default stdout)");
}

void cmd_orbits(const Common& c, std::optional<double> max_period) {
    const ConfigDocument doc = load_config(c.config);
    const SystemModel model = build_model(doc.system, doc.build);
    const double limit = max_period.value_or(model.data.horizon);
    if (limit > model.data.horizon) {
        throw Error(ErrorKind::HorizonTooShort,
                    "--max-period " + format_double(limit) + " exceeds the data horizon " +
                        format_double(model.data.horizon) + " (raise horizon.multiples)");
    }
    emit(c.output, period_class_csv(model.data.period_classes, limit));
    if (!model.fixed_points.empty()) {
        emit_sidecar(c.output, ".fixed_points.csv", fixed_point_csv(model.fixed_points));
    }
}

void cmd_zeta_eval(const Common& c, const std::string& lambda_text, const std::string& method) {
    const ConfigDocument doc = load_config(c.config);
    const SystemModel model = build_model(doc.system, doc.build);
    const auto v = parse_list(lambda_text, "--lambda", 2);
    const cplx lambda{v[0], v[1]};
    ZetaOptions opts;
    if (method == "series") {
        opts.method = ZetaMethod::Series;
    } else if (method == "product") {
        opts.method = ZetaMethod::Product;
    }
    const ZetaEvaluation z = zeta1(model.data, lambda, opts);
    const ZetaEvaluation dz = zeta1_log_derivative(model.data, lambda, opts);
    Report r;
    r.add("lambda", lambda);
    r.add("zeta1", z.value);
    r.add("zeta1_method", method_name(z.method));
    r.add("zeta1_tail_bound", z.tail_bound);
    r.add("zeta1_heuristic", z.heuristic);
    r.add("truncation_horizon", z.truncation_horizon);
    r.add("log_derivative", dz.value);
    r.add("log_derivative_tail_bound", dz.tail_bound);
    if (model.data.primitive_orbits) {
        try {
            const ZetaEvaluation zr = ruelle_zeta(model.data, lambda);
            r.add("ruelle", zr.value);
            r.add("ruelle_tail_bound", zr.tail_bound);
            r.add("ruelle_heuristic", zr.heuristic);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DivergentRegion) {
                throw;
            }
            r.add("ruelle", std::string("divergent (Re lambda below the product's abscissa)"));
        }
    } else {
        r.add("ruelle", std::string("unavailable (no primitive orbit list)"));
    }
    if (!model.fixed_points.empty()) {
        r.add("note", std::string("fixed points do not enter zeta1"));
    }
    emit(c.output, r.str());
}

void cmd_exact(const Common& c, const std::string& window_flag) {
    const ConfigDocument doc = load_config(c.config);
    const WindowSpec w = window_from(window_flag, doc);
    emit(c.output, resonance_csv(exact_resonances(doc.system, w)));
}

struct LocateFlags {
    std::string window;
    std::optional<double> tol;
    std::optional<double> edge_clearance;
    std::optional<double> seed_diameter;
};

void cmd_locate(const Common& c, const LocateFlags& f) {
    const ConfigDocument doc = load_config(c.config);
    const WindowSpec w = window_from(f.window, doc);
    const SystemModel model = build_model(doc.system, doc.build);
    if (!model.fixed_points.empty()) {
        throw Error(ErrorKind::Validation,
                    "locate finds zeros of zeta1 from closed orbits; fixed-point resonances "
                    "are listed by 'exact'");
    }
    LocateOptions opts = doc.locate;
    auto positive = [](std::optional<double> v, const char* name, double& slot) {
        if (v) {
            if (!(*v > 0.0)) {
                throw Error(ErrorKind::Validation, std::string(name) + " must be positive");
            }
            slot = *v;
        }
    };
    positive(f.tol, "--tol", opts.newton.tolerance);
    positive(f.edge_clearance, "--edge-clearance", opts.contour.edge_clearance);
    positive(f.seed_diameter, "--seed-diameter", opts.seed_diameter);
    const ContinuedZeta zeta = continued_zeta(model.data);
    if (zeta.lattice_spacing > 0.0) {
        opts.contour.lattice_spacing = zeta.lattice_spacing;
    }
    const LocateResult result = locate_resonances(zeta.function, w, opts);
    emit(c.output, resonance_csv(result.resonances));
}

struct TraceFlags {
    std::optional<double> l;
    std::optional<double> d;
    std::string A;
    std::optional<double> re_cutoff;
    double C = 1.0;
    double epsilon = 0.1;
    std::optional<int> dimension;
    std::string resonances;
};

void cmd_trace_check(const Common& c, const TraceFlags& f) {
    const ConfigDocument doc = load_config(c.config);
    BumpSpec bump = doc.bump.value_or(BumpSpec{});
    if (f.l) {
        bump.l = *f.l;
    }
    if (f.d) {
        bump.d = *f.d;
    }
    bump.validate();
    double A = doc.strip_depth.value_or(kInf);
    if (!f.A.empty()) {
        A = parse_depth(f.A);
    }
    TraceOptions opts;
    opts.re_cutoff = f.re_cutoff.value_or(doc.re_cutoff);
    if (!(opts.re_cutoff > 0.0)) {
        throw Error(ErrorKind::Validation, "--re-cutoff must be positive");
    }
    opts.shape_constant = f.C;
    opts.shape_epsilon = f.epsilon;
    opts.dimension = f.dimension;
    const SystemModel model = build_model(doc.system, doc.build);
    TraceReport report;
    if (f.resonances.empty()) {
        report = trace_check(model, bump, A, opts);
    } else {
        const auto list = parse_resonance_csv(read_file(f.resonances));
        report = trace_check(model, list, bump, A, opts);
    }
    emit(c.output, trace_report(report).str());
}

struct CountFlags {
    std::optional<double> emax;
    std::optional<double> beta;
    bool fit = false;
    std::string grid;
    std::string resonances;
    std::string complete;
};

void cmd_count(const Common& c, const CountFlags& f) {
    const ConfigDocument doc = load_config(c.config);
    const double beta = f.beta ? *f.beta : doc.beta.value_or(0.5);
    if (!f.emax || !(*f.emax > 0.0)) {
        throw Error(ErrorKind::Validation, "--emax must be positive");
    }
    const double emax = *f.emax;
    std::vector<double> grid;
    if (f.grid.empty()) {
        for (int k = 5; k >= 0; --k) {
            grid.push_back(emax / std::pow(2.0, k));
        }
    } else {
        grid = parse_list(f.grid, "--grid", 0);
    }
    ResonanceSource src;
    if (f.resonances.empty()) {
        src = exact_source(doc.system, emax, beta);
    } else {
        src.points = parse_resonance_csv(read_file(f.resonances));
        if (f.complete.empty()) {
            throw Error(ErrorKind::Validation,
                        "--resonances needs --complete re_min,re_max,im_min,im_max");
        }
        const auto v = parse_list(f.complete, "--complete", 4);
        src.complete_in = {v[0], v[1], v[2], v[3]};
    }
    CountReport report;
    if (f.fit) {
        report = growth_fit(src, grid, beta);
    } else {
        report.beta = beta;
        for (const double E : grid) {
            const StripCount sc{E, count_in_strip(src, E, beta), per_unit_max(src, E, beta)};
            report.per_unit_max = std::max(report.per_unit_max, sc.per_unit);
            report.strip_counts.push_back(sc);
        }
    }
    emit(c.output, count_csv(report));
    if (f.fit) {
        emit_sidecar(c.output, ".fit.txt", fit_report(report).str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonance laboratory: periodic orbits, zeta functions, resonances, trace checks"};
    app.require_subcommand(1);

    Common common;
    std::optional<double> max_period;
    auto* orbits = app.add_subcommand("orbits", "period classes as CSV");
    add_common(orbits, common);
    orbits->add_option("--max-period", max_period, "largest total period listed");

    std::string lambda;
    std::string method = "auto";
    auto* zeta = app.add_subcommand("zeta-eval", "evaluate zeta1 and the Ruelle zeta at a point");
    add_common(zeta, common);
    zeta->add_option("--lambda", lambda, "re,im")->required();
    zeta->add_option("--method", method, "auto, series or product")
        ->check(CLI::IsMember({"auto", "series", "product"}));

    std::string exact_window;
    auto* exact = app.add_subcommand("exact", "closed-form resonance lattice in a window");
    add_common(exact, common);
    exact->add_option("--window", exact_window, "re_min,re_max,im_min,im_max");

    LocateFlags lf;
    auto* locate = app.add_subcommand("locate", "zeros of zeta1 by the argument principle");
    add_common(locate, common);
    locate->add_option("--window", lf.window, "re_min,re_max,im_min,im_max");
    locate->add_option("--tol", lf.tol, "Newton tolerance");
    locate->add_option("--edge-clearance", lf.edge_clearance, "minimum zero distance to edges");
    locate->add_option("--seed-diameter", lf.seed_diameter, "box size handed to Newton");

    TraceFlags tf;
    auto* trace = app.add_subcommand("trace-check", "geometric against spectral side");
    add_common(trace, common);
    trace->add_option("--l", tf.l, "bump half-width");
    trace->add_option("--d", tf.d, "bump center");
    trace->add_option("--A", tf.A, "strip depth, or inf for every lattice line");
    trace->add_option("--re-cutoff", tf.re_cutoff, "largest |Re mu| summed");
    trace->add_option("--C", tf.C, "bound-shape constant");
    trace->add_option("--epsilon", tf.epsilon, "bound-shape epsilon");
    trace->add_option("--dimension", tf.dimension, "n in the bound shape");
    trace->add_option("--resonances", tf.resonances, "resonance CSV instead of the exact lattice");

    CountFlags cf;
    auto* count = app.add_subcommand("count", "strip counts and growth fit");
    add_common(count, common);
    count->add_option("--emax", cf.emax, "largest E")->required();
    count->add_option("--beta", cf.beta, "strip depth");
    count->add_flag("--fit", cf.fit, "least-squares growth exponent");
    count->add_option("--grid", cf.grid, "comma-separated E values (default emax/32 .. emax)");
    count->add_option("--resonances", cf.resonances, "resonance CSV instead of the exact lattice");
    count->add_option("--complete", cf.complete, "completeness window of --resonances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (orbits->parsed()) {
            cmd_orbits(common, max_period);
        } else if (zeta->parsed()) {
            cmd_zeta_eval(common, lambda, method);
        } else if (exact->parsed()) {
            cmd_exact(common, exact_window);
        } else if (locate->parsed()) {
            cmd_locate(common, lf);
        } else if (trace->parsed()) {
            cmd_trace_check(common, tf);
        } else if (count->parsed()) {
            cmd_count(common, cf);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_numerical_guard(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
