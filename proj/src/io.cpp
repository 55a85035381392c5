#include "reslab/io.hpp"

#include "reslab/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace reslab {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::Validation, (path.empty() ? std::string("config") : path) + ": " + msg);
}

std::string type_name(const json& j) {
    if (j.is_number()) {
        return "number";
    }
    return j.type_name();
}

double finite_number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        schema_error(path, "expected a number, got " + type_name(j));
    }
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
        schema_error(path, "number is not finite");
    }
    return x;
}

cplx complex_value(const json& j, const std::string& path) {
    if (j.is_number()) {
        return {finite_number(j, path), 0.0};
    }
    if (j.is_array() && j.size() == 2) {
        return {finite_number(j[0], path + "[0]"), finite_number(j[1], path + "[1]")};
    }
    schema_error(path, "expected a number or [re, im]");
}

// Object view that tracks which keys were read, so leftovers can be rejected.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) {
            schema_error(path_, "expected an object, got " + type_name(j));
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key) {
        if (!j_.contains(key)) {
            schema_error(path_, "missing required key '" + key + "'");
        }
        used_.insert(key);
        return j_.at(key);
    }

    [[nodiscard]] std::string sub(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    double number(const std::string& key) { return finite_number(at(key), sub(key)); }

    std::optional<double> opt_number(const std::string& key) {
        if (!has(key)) {
            return std::nullopt;
        }
        return number(key);
    }

    double number_or(const std::string& key, double fallback) {
        return opt_number(key).value_or(fallback);
    }

    long long integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) {
            schema_error(sub(key), "expected an integer, got " + type_name(v));
        }
        return v.get<long long>();
    }

    int int_or(const std::string& key, int fallback, int lo, int hi) {
        if (!has(key)) {
            return fallback;
        }
        const long long v = integer(key);
        if (v < lo || v > hi) {
            schema_error(sub(key), "must lie in [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
        }
        return static_cast<int>(v);
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = at(key);
        if (!v.is_boolean()) {
            schema_error(sub(key), "expected true or false, got " + type_name(v));
        }
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) {
            schema_error(sub(key), "expected a string, got " + type_name(v));
        }
        return v.get<std::string>();
    }

    const json& array(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array()) {
            schema_error(sub(key), "expected an array, got " + type_name(v));
        }
        return v;
    }

    std::vector<cplx> complex_list(const std::string& key) {
        const json& v = array(key);
        std::vector<cplx> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(complex_value(v[i], sub(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    std::vector<double> real_list(const std::string& key) {
        const json& v = array(key);
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(finite_number(v[i], sub(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!used_.count(item.key())) {
                schema_error(sub(item.key()), "unknown key");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename F>
void with_path(const std::string& path, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Validation && e.kind() != ErrorKind::NonHyperbolic &&
            e.kind() != ErrorKind::NotHyperbolic) {
            throw;
        }
        throw Error(ErrorKind::Validation, path + ": " + e.what());
    }
}

PrimitiveOrbit parse_orbit(const json& j, const std::string& path) {
    Obj o(j, path);
    PrimitiveOrbit orbit;
    orbit.id = o.string("id");
    orbit.primitive_period = o.number("primitive_period");
    orbit.backward_poincare_eigenvalues = o.complex_list("backward_poincare_eigenvalues");
    const long long s = o.integer("stable_count");
    if (s < 0 || s > 1000) {
        schema_error(o.sub("stable_count"), "out of range");
    }
    orbit.stable_count = static_cast<int>(s);
    orbit.stable_orientable = o.boolean_or("stable_orientable", true);
    if (o.has("weight_eigenvalues")) {
        orbit.weight_eigenvalues = o.complex_list("weight_eigenvalues");
    }
    o.finish();
    with_path(path, [&] { validate(orbit); });
    return orbit;
}

FixedPointDatum parse_fixed_point(const json& j, const std::string& path) {
    Obj o(j, path);
    FixedPointDatum fp;
    fp.id = o.string("id");
    fp.generator_eigenvalues = o.complex_list("generator_eigenvalues");
    const long long s = o.integer("stable_count");
    if (s < 0 || s > 1000) {
        schema_error(o.sub("stable_count"), "out of range");
    }
    fp.stable_count = static_cast<int>(s);
    if (o.has("weight_generator_eigenvalues")) {
        fp.weight_generator_eigenvalues = o.complex_list("weight_generator_eigenvalues");
    }
    o.finish();
    with_path(path, [&] { validate(fp); });
    return fp;
}

std::vector<PrimitiveOrbit> parse_orbits(Obj& o, const std::string& key) {
    std::vector<PrimitiveOrbit> out;
    if (!o.has(key)) {
        return out;
    }
    const json& a = o.array(key);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.push_back(parse_orbit(a[i], o.sub(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

SystemSpec parse_system(const json& j) {
    Obj o(j, "system");
    const std::string type = o.string("type");
    SystemSpec spec;
    if (type == "toral_suspension") {
        ToralSuspension t;
        const json& m = o.array("matrix");
        if (m.size() != 2) {
            schema_error("system.matrix", "expected a 2x2 integer matrix");
        }
        for (std::size_t r = 0; r < 2; ++r) {
            const std::string row = "system.matrix[" + std::to_string(r) + "]";
            if (!m[r].is_array() || m[r].size() != 2) {
                schema_error(row, "expected a row of 2 integers");
            }
            for (std::size_t c = 0; c < 2; ++c) {
                if (!m[r][c].is_number_integer()) {
                    schema_error(row + "[" + std::to_string(c) + "]", "expected an integer");
                }
                t.matrix[r][c] = m[r][c].get<std::int64_t>();
            }
        }
        t.roof = o.number_or("roof", 1.0);
        spec = t;
    } else if (type == "linear_horseshoe") {
        HorseshoeSuspension h;
        h.expansion = o.number("expansion");
        h.contraction = o.number("contraction");
        h.symbol_count = o.int_or("symbol_count", 2, 2, 64);
        h.symbol_weights = o.has("symbol_weights") ? o.real_list("symbol_weights")
                                                   : std::vector<double>(h.symbol_count, 1.0);
        h.roof = o.number_or("roof", 1.0);
        spec = h;
    } else if (type == "morse_smale") {
        MorseSmale ms;
        ms.closed_orbits = parse_orbits(o, "closed_orbits");
        if (o.has("fixed_points")) {
            const json& a = o.array("fixed_points");
            for (std::size_t i = 0; i < a.size(); ++i) {
                ms.fixed_points.push_back(
                    parse_fixed_point(a[i], "system.fixed_points[" + std::to_string(i) + "]"));
            }
        }
        spec = ms;
    } else if (type == "explicit_orbits") {
        ExplicitOrbits ex;
        (void)o.array("orbits");
        ex.orbits = parse_orbits(o, "orbits");
        spec = ex;
    } else {
        schema_error("system.type", "unknown system type '" + type +
                                        "' (toral_suspension, linear_horseshoe, morse_smale, "
                                        "explicit_orbits)");
    }
    o.finish();
    with_path("system", [&] { validate(spec); });
    return spec;
}

WindowSpec parse_window(const json& j, const std::string& path) {
    Obj o(j, path);
    WindowSpec w{o.number("re_min"), o.number("re_max"), o.number("im_min"), o.number("im_max")};
    o.finish();
    with_path(path, [&] { w.validate(true); });
    return w;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json parse_json(std::string_view text) {
    // Duplicate keys are a parse error; nlohmann would keep the last one.
    std::vector<std::set<std::string>> keys;
    std::string duplicate;
    const auto callback = [&](int, json::parse_event_t event, json& parsed) {
        switch (event) {
        case json::parse_event_t::object_start:
            keys.emplace_back();
            break;
        case json::parse_event_t::object_end:
            keys.pop_back();
            break;
        case json::parse_event_t::key:
            if (!keys.back().insert(parsed.get<std::string>()).second && duplicate.empty()) {
                duplicate = parsed.get<std::string>();
            }
            break;
        default:
            break;
        }
        return true;
    };
    json j;
    try {
        j = json::parse(text.begin(), text.end(), callback);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string msg = e.what();
        if (const auto pos = msg.find("syntax error"); pos != std::string::npos) {
            msg = msg.substr(pos);
        }
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ", column " +
                                          std::to_string(col) + ": " + msg);
    } catch (const json::out_of_range& e) {
        // nlohmann reports overflowing literals such as 1e999 this way, without a position.
        std::string msg = e.what();
        if (const auto pos = msg.find(']'); pos != std::string::npos) {
            msg = msg.substr(pos + 2);
        }
        throw Error(ErrorKind::Parse, msg);
    }
    if (!duplicate.empty()) {
        throw Error(ErrorKind::Parse, "duplicate key '" + duplicate + "'");
    }
    return j;
}

void append_field(std::string& out, std::string_view s) {
    const bool quote = s.find_first_of(",\"\n") != std::string_view::npos;
    if (!quote) {
        out += s;
        return;
    }
    out += '"';
    for (const char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out(1);
    for (const char c : line) {
        if (c == sep) {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x)) {
        throw Error(ErrorKind::Parse,
                    "line " + std::to_string(line) + ": not a finite number '" + s + "'");
    }
    return x;
}

} // namespace

std::string format_double(double x) {
    if (x == 0.0) {
        return "0"; // folds -0
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp =
        dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::Validation, "cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignore;
            fs::remove(tmp, ignore);
            throw Error(ErrorKind::Validation, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw Error(ErrorKind::Validation, "cannot rename onto " + path.string() + ": " +
                                               ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Validation, "cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ConfigDocument parse_config(std::string_view text) {
    const json j = parse_json(text);
    Obj root(j, "");
    ConfigDocument doc;
    doc.system = parse_system(root.at("system"));

    if (root.has("horizon")) {
        Obj h(root.at("horizon"), "horizon");
        doc.build.horizon_multiples = h.int_or("multiples", doc.build.horizon_multiples, 1, 100000);
        doc.build.line_truncation = h.int_or("line_truncation", doc.build.line_truncation, 1, 1000);
        doc.build.max_word_length = h.int_or("max_word_length", doc.build.max_word_length, 1, 24);
        doc.build.rate_floor = h.number_or("rate_floor", doc.build.rate_floor);
        if (!(doc.build.rate_floor > 0.0 && doc.build.rate_floor < 1.0)) {
            schema_error("horizon.rate_floor", "must lie in (0, 1)");
        }
        h.finish();
    }
    if (root.has("tolerances")) {
        Obj t(root.at("tolerances"), "tolerances");
        auto positive = [&](const std::string& key, double& slot) {
            if (const auto v = t.opt_number(key)) {
                if (!(*v > 0.0)) {
                    schema_error(t.sub(key), "must be positive");
                }
                slot = *v;
            }
        };
        positive("newton", doc.locate.newton.tolerance);
        positive("edge_clearance", doc.locate.contour.edge_clearance);
        positive("winding", doc.locate.contour.winding_tolerance);
        positive("integer_guard", doc.locate.contour.integer_guard);
        positive("seed_diameter", doc.locate.seed_diameter);
        positive("re_cutoff", doc.re_cutoff);
        doc.locate.newton.max_iterations =
            t.int_or("newton_iterations", doc.locate.newton.max_iterations, 1, 100000);
        doc.locate.contour.perturbation_attempts =
            t.int_or("perturbation_attempts", doc.locate.contour.perturbation_attempts, 0, 100);
        if (doc.locate.contour.integer_guard >= 0.5) {
            schema_error("tolerances.integer_guard", "must be below 0.5");
        }
        t.finish();
    }
    if (root.has("window")) {
        doc.window = parse_window(root.at("window"), "window");
    }
    if (root.has("bump")) {
        Obj b(root.at("bump"), "bump");
        BumpSpec spec;
        spec.l = b.number("l");
        spec.d = b.number("d");
        spec.quadrature_order = b.int_or("quadrature_order", spec.quadrature_order, 2, 100000);
        b.finish();
        with_path("bump", [&] { spec.validate(); });
        doc.bump = spec;
    }
    if (root.has("strip")) {
        Obj s(root.at("strip"), "strip");
        doc.beta = s.opt_number("beta");
        doc.strip_depth = s.opt_number("A");
        if (doc.beta && !(*doc.beta > 0.0)) {
            schema_error("strip.beta", "must be positive");
        }
        if (doc.strip_depth && !(*doc.strip_depth > 0.0)) {
            schema_error("strip.A", "must be positive");
        }
        s.finish();
    }
    root.finish();
    return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return parse_config(text);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

std::string resonance_csv(const std::vector<Resonance>& resonances) {
    std::string out = "re,im,multiplicity,provenance\n";
    for (const Resonance& r : resonances) {
        out += format_double(r.value.real());
        out += ',';
        out += format_double(r.value.imag());
        out += ',';
        out += std::to_string(r.multiplicity);
        out += ',';
        append_field(out, to_string(r.provenance));
        out += '\n';
    }
    return out;
}

std::vector<Resonance> parse_resonance_csv(std::string_view text) {
    std::vector<Resonance> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool header = true;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (header) {
            header = false;
            if (line != "re,im,multiplicity,provenance") {
                throw Error(ErrorKind::Parse, "line 1: expected header re,im,multiplicity,provenance");
            }
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 4) {
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": expected 4 fields");
        }
        Resonance r;
        r.value = {parse_double(f[0], line_no), parse_double(f[1], line_no)};
        int m = 0;
        const auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), m);
        if (ec != std::errc{} || ptr != f[2].data() + f[2].size() || m < 1) {
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": bad multiplicity '" + f[2] + "'");
        }
        r.multiplicity = m;
        if (f[3] == "ExactLattice") {
            r.provenance = Provenance::ExactLattice;
        } else if (f[3] == "Located") {
            r.provenance = Provenance::Located;
        } else {
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": bad provenance '" + f[3] + "'");
        }
        out.push_back(r);
    }
    if (header) {
        throw Error(ErrorKind::Parse, "empty resonance table");
    }
    return out;
}

std::string period_class_csv(const std::vector<PeriodClass>& classes, double max_period) {
    std::string out = "total_period,re_weight,im_weight\n";
    for (const PeriodClass& c : classes) {
        if (c.total_period > max_period) {
            break;
        }
        out += format_double(c.total_period) + ',' + format_double(c.geometric_weight.real()) +
               ',' + format_double(c.geometric_weight.imag()) + '\n';
    }
    return out;
}

std::string fixed_point_csv(const std::vector<FixedPointDatum>& fixed_points) {
    std::string out = "id,stable_count,kind,re,im\n";
    auto rows = [&](const FixedPointDatum& fp, std::string_view kind,
                    const std::vector<cplx>& values) {
        for (const cplx v : values) {
            append_field(out, fp.id);
            out += ',' + std::to_string(fp.stable_count) + ',';
            out += kind;
            out += ',' + format_double(v.real()) + ',' + format_double(v.imag()) + '\n';
        }
    };
    for (const FixedPointDatum& fp : fixed_points) {
        rows(fp, "generator", fp.generator_eigenvalues);
        rows(fp, "weight", fp.weight_generator_eigenvalues);
    }
    return out;
}

std::string count_csv(const CountReport& report) {
    std::string out = "E,count,per_unit\n";
    for (const StripCount& c : report.strip_counts) {
        out += format_double(c.E) + ',' + std::to_string(c.count) + ',' +
               std::to_string(c.per_unit) + '\n';
    }
    return out;
}

void Report::add(std::string key, std::string value) {
    lines_.emplace_back(std::move(key), std::move(value));
}

void Report::add(std::string key, double value) {
    if (std::isinf(value)) {
        add(std::move(key), std::string(value > 0 ? "inf" : "-inf"));
    } else if (std::isnan(value)) {
        add(std::move(key), std::string("nan"));
    } else {
        add(std::move(key), format_double(value));
    }
}

void Report::add(std::string key, cplx value) {
    add(std::move(key), "[" + format_double(value.real()) + ", " + format_double(value.imag()) + "]");
}

void Report::add(std::string key, long long value) { add(std::move(key), std::to_string(value)); }

void Report::add(std::string key, bool value) {
    add(std::move(key), std::string(value ? "true" : "false"));
}

std::string Report::str() const {
    std::string out;
    for (const auto& [k, v] : lines_) {
        out += k + ": " + v + '\n';
    }
    return out;
}

Report trace_report(const TraceReport& r) {
    Report out;
    out.add("l", r.l);
    out.add("d", r.d);
    out.add("strip_depth", r.strip_depth);
    out.add("re_cutoff", r.re_cutoff);
    out.add("summation_floor", r.summation_floor);
    out.add("geometric_side", r.geometric_side);
    out.add("spectral_side", r.spectral_side);
    out.add("spectral_terms", static_cast<long long>(r.spectral_terms));
    out.add("spectral_tail_bound", r.spectral_tail_bound);
    out.add("residual", r.residual);
    out.add("residual_abs", std::abs(r.residual));
    out.add("shape_constant", r.shape_constant);
    out.add("shape_epsilon", r.shape_epsilon);
    out.add("dimension", static_cast<long long>(r.dimension));
    out.add("bound_shape_value", r.bound_shape_value);
    if (std::isfinite(r.strip_depth)) {
        out.add("within_bound_shape", std::abs(r.residual) <= r.bound_shape_value);
    }
    out.add("within_tail_bound", std::abs(r.residual) <= r.spectral_tail_bound);
    return out;
}

Report fit_report(const CountReport& r) {
    Report out;
    out.add("beta", r.beta);
    out.add("grid_points", static_cast<long long>(r.strip_counts.size()));
    out.add("fitted_exponent", r.fitted_exponent);
    out.add("half_width", r.half_width);
    out.add("prefactor", r.prefactor);
    out.add("per_unit_max", static_cast<long long>(r.per_unit_max));
    return out;
}

} // namespace reslab
