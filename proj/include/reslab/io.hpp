#pragma once

// Configuration documents, CSV tables and key: value reports.

#include "reslab/count.hpp"
#include "reslab/resonance.hpp"
#include "reslab/systems.hpp"
#include "reslab/trace.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace reslab {

/// Shortest decimal that reads back to the same double.
[[nodiscard]] std::string format_double(double x);

/// Writes through a temporary file in the same directory and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

struct ConfigDocument {
    SystemSpec system;
    BuildOptions build;
    LocateOptions locate;
    double re_cutoff = 400.0;
    std::optional<WindowSpec> window;
    std::optional<BumpSpec> bump;
    std::optional<double> beta;
    std::optional<double> strip_depth; // A
};

/// Strict parse: unknown or duplicate keys, wrong types and non-finite numbers
/// are rejected. Syntax errors throw Error{Parse} with line and column; schema
/// errors throw Error{Validation} naming the key path.
[[nodiscard]] ConfigDocument parse_config(std::string_view text);
[[nodiscard]] ConfigDocument load_config(const std::filesystem::path& path);

// --- CSV -----------------------------------------------------------------

/// Header re,im,multiplicity,provenance.
[[nodiscard]] std::string resonance_csv(const std::vector<Resonance>& resonances);
/// Throws Error{Parse} with the offending line number.
[[nodiscard]] std::vector<Resonance> parse_resonance_csv(std::string_view text);

/// Header total_period,re_weight,im_weight.
[[nodiscard]] std::string period_class_csv(const std::vector<PeriodClass>& classes,
                                           double max_period);

/// One row per eigenvalue: id,stable_count,kind,re,im with kind generator|weight.
[[nodiscard]] std::string fixed_point_csv(const std::vector<FixedPointDatum>& fixed_points);

/// Header E,count,per_unit.
[[nodiscard]] std::string count_csv(const CountReport& report);

// --- reports -------------------------------------------------------------

/// Ordered key: value lines. Complex values print as [re, im].
class Report {
public:
    void add(std::string key, std::string value);
    void add(std::string key, double value);
    void add(std::string key, cplx value);
    void add(std::string key, long long value);
    void add(std::string key, bool value);

    [[nodiscard]] std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

[[nodiscard]] Report trace_report(const TraceReport& report);
[[nodiscard]] Report fit_report(const CountReport& report);

} // namespace reslab
