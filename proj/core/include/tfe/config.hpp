#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfe/errors.hpp"
#include "tfe/params.hpp"
#include "tfe/transient.hpp"

namespace tfe {

enum class Command { SelfSimilar, Asymptotics, Transient, Figure, Sweep };

const char* to_string(Command c) noexcept;

struct DatumSpec {
    InitialDatum preset = InitialDatum::Fig1Bump;
    /// CSV of (y, h) rows; replaces the preset when set.
    std::optional<std::string> file;

    bool operator==(const DatumSpec&) const = default;
};

struct SweepSpec {
    std::vector<double> n;
    std::vector<double> alpha;
    std::size_t workers = 0;  ///< 0 picks the hardware concurrency

    bool operator==(const SweepSpec&) const = default;
};

/// Configuration document, JSON with a fixed key set:
///   command, params {n, alpha, D | d, mass}, step {...}, initial_datum ("fig1_bump" |
///   "corner" | {"file": path}), t_end, output_times, output_dir, figures, figure_t_end,
///   grid_cells, sweep {n, alpha, workers}.
struct RunConfig {
    Command command = Command::SelfSimilar;
    ProblemParams params;
    StepConfig step = [] {
        StepConfig c;
        c.tau = 1e-6;
        c.tau_rel = 1e-3;
        return c;
    }();
    DatumSpec initial_datum;
    double t_end = 1.0;
    std::vector<double> output_times;
    std::string output_dir = "out";
    std::vector<std::string> figures;  ///< tags for the figure command
    double figure_t_end = 1e6;
    std::size_t grid_cells = 400;  ///< output grid of selfsimilar/asymptotics profiles
    SweepSpec sweep;
    std::vector<std::string> overrides;  ///< applied key=value strings, in order

    bool operator==(const RunConfig&) const = default;
};

/// Thrown for malformed documents; line and column are 1-based.
class ConfigParseError : public Error {
public:
    ConfigParseError(int line, int column, const std::string& message)
        : Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Strict parse: unknown keys and wrong types are ParseError, broken invariants
/// ValidationError. Overrides ("key=value", key a field name or dotted path) are applied
/// to the document before validation.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Throws ValidationError naming the violated invariant.
void validate(const RunConfig& config);

}  // namespace tfe
