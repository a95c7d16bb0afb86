#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfe/asymptotics.hpp"
#include "tfe/grid.hpp"
#include "tfe/transient.hpp"

namespace tfe {

struct FitWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

struct ExponentFit {
    double gamma_hat = 0.0;
    double prefactor_hat = 0.0;
    FitWindow window;
    double residual = 0.0;  ///< RMS of the log-log fit
    std::size_t samples = 0;
};

/// Least-squares slope of log s against log t. Without a window the last decade of t
/// is used. Throws InsufficientData for fewer than 10 samples or less than a decade.
ExponentFit fit_spreading_exponent(const std::vector<double>& t, const std::vector<double>& s,
                                   std::optional<FitWindow> window = std::nullopt);

struct CorrectionFit {
    double exponent = 0.0;     ///< fitted k in d/dt(t^-gamma s) ~ t^-(k+1)
    double coefficient = 0.0;  ///< of |d/dt(t^-gamma s)|
    double expected = 0.0;     ///< 1 - gamma(n+4) (strong) or beta (weak)
    double relative_error = 0.0;
    FitWindow window;
    double residual = 0.0;
};

/// Decay exponent of t^-gamma s(t) - const, measured through d/dt(t^-gamma s) on a
/// geometric resampling (20 points per decade). Throws NoDecay if the fit is not decaying.
CorrectionFit correction_rate(const std::vector<double>& t, const std::vector<double>& s, double gamma,
                              std::optional<FitWindow> window = std::nullopt);
CorrectionFit correction_rate(const std::vector<double>& t, const std::vector<double>& s,
                              const AsymptoticPrediction& prediction,
                              std::optional<FitWindow> window = std::nullopt);
/// Centred d/dt(t^-gamma s) on a geometric resampling of [window.t_lo, window.t_hi].
std::vector<std::pair<double, double>> correction_derivative(const std::vector<double>& t,
                                                             const std::vector<double>& s, double gamma,
                                                             FitWindow window);
/// Decay exponent of a distance series d(t) ~ t^-k.
CorrectionFit distance_decay_rate(const std::vector<double>& t, const std::vector<double>& d,
                                  std::optional<FitWindow> window = std::nullopt);

/// 257 uniform nodes on [0,1].
Grid1D comparison_grid();

struct ProfileDistance {
    double sup = 0.0;
    double l2 = 0.0;
};

/// Distances after interpolation of both onto the comparison grid.
ProfileDistance profile_distance(const Profile& a, const Profile& b);

/// Rescaled transient profile H(t,x) = s h(c + s x) on the comparison grid, averaged
/// over x and -x.
Profile rescaled_profile(const TransientState& state);

struct DistanceRecord {
    double t = 0.0;
    ProfileDistance distance;
};

struct DistanceSeries {
    std::vector<DistanceRecord> records;
    /// sup distance non-increasing over the last decade of snapshot times
    bool monotone_last_decade = false;
};

DistanceSeries compare_profiles(const std::vector<Snapshot>& snapshots, const Profile& target);

struct CorrectionRecord {
    double t = 0.0;
    double sup_distance = 0.0;
    Profile shape;  ///< (H - H0) / |H - H0|_inf on the comparison grid
    double shape_error = 0.0;  ///< L2 distance to H1 / |H1|_inf
};

CorrectionRecord correction_record(const TransientState& state, const Profile& H0, const Profile& H1);

enum class FigureTag { Fig1, Fig3, Fig5, Fig6, Fig7, Fig8, Fig9 };

FigureTag parse_figure_tag(const std::string& tag);
const char* to_string(FigureTag tag) noexcept;

struct FigureOptions {
    StepConfig step = [] {
        StepConfig c;
        c.tau = 1e-6;
        c.tau_rel = 1e-3;
        return c;
    }();
    /// End time of the long runs (fig3 and later); fig1 stops at 10.
    double t_end = 1e6;
};

struct FigureArtifacts {
    std::filesystem::path directory;
    std::filesystem::path data_csv;
    std::filesystem::path plot_svg;
    std::filesystem::path meta_json;
};

/// Writes out_root/<tag>/{data.csv, plot.svg, meta.json}.
FigureArtifacts reproduce_figure(FigureTag tag, const std::filesystem::path& out_root,
                                 const FigureOptions& options = {});

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<SvgSeries> series;
};

/// Minimal self-contained line plot.
std::string render_svg(const SvgPlot& plot);
/// Panels tiled row by row.
std::string render_svg(const std::vector<SvgPlot>& panels, std::size_t columns);

}  // namespace tfe
