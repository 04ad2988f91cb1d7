#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "wgm/temporal.hpp"

namespace wgm {

/// Coincidence counts over idler wavelength and signal-idler time difference.
struct Spectrogram2D {
    Eigen::VectorXd lambda_nm;  ///< column axis
    Eigen::VectorXd t_s;        ///< row axis
    Eigen::MatrixXd counts;     ///< rows: T, cols: lambda
    /// Acquisition metadata, e.g. `dwdm_channel`, `pump_channel`, `radius_um`.
    std::map<std::string, std::string> metadata;

    /// Throws FormatError on shape mismatch, non-monotone axes or negative counts.
    void validate() const;
};

/// Reads the text format: `# key: value` header lines (including `lambda_nm` and `T_us`),
/// then one CSV row of counts per T value.
[[nodiscard]] Spectrogram2D ingest_spectrogram(const std::string& path);
void write_spectrogram(const Spectrogram2D& sg, const std::string& path);

/// Closed interval on one axis.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

struct Marginals {
    Eigen::VectorXd lambda_nm;  ///< lambda bins inside the window
    Eigen::VectorXd spectral;   ///< counts summed over the T window
    Eigen::VectorXd t_s;        ///< T bins inside the window
    Eigen::VectorXd temporal;   ///< counts summed over the lambda window
    double total = 0.0;         ///< counts inside both windows
};

/// Marginals over a rectangle. Throws DomainError if a window is outside its axis or empty.
[[nodiscard]] Marginals marginals(const Spectrogram2D& sg, Window lambda_nm, Window t_s);
/// Marginals over the whole matrix.
[[nodiscard]] Marginals marginals(const Spectrogram2D& sg);

/// Column nearest lambda0, averaged in consecutive blocks of `group_size` T samples.
///
/// Each block gives its mean and sample standard deviation, placed at the mean T of the block.
/// Trailing samples that do not fill a block are dropped and `truncated` is set.
[[nodiscard]] TedTrace ted_envelope(const Spectrogram2D& sg, double lambda0_nm, int group_size);

/// Q = nu / delta_nu.
[[nodiscard]] double q_from_linewidth(double nu_hz, double linewidth_hz);

/// Idler wavelength from energy conservation, 1 / (2/lambda_p - 1/lambda_s). Any length unit.
[[nodiscard]] double idler_wavelength(double lambda_p, double lambda_s);

struct EnergyCheck {
    double predicted_nm = 0.0;
    double expected_nm = 0.0;
    double deviation_nm = 0.0;
    double tolerance_nm = 0.0;
    bool ok = false;
};

/// Compares the energy-conserving idler wavelength with an expected centre.
[[nodiscard]] EnergyCheck check_energy_conservation(double pump_nm, double signal_nm, double expected_idler_nm,
                                                    double tolerance_nm = 0.25);

/// Linewidth and Q from a TED envelope at a known idler wavelength.
struct LinewidthReport {
    double idler_nm = 0.0;
    double linewidth_hz = 0.0;
    double q = 0.0;
    double ted_fwhm_s = 0.0;
    double ted_efold_s = 0.0;
    double background = 0.0;  ///< constant subtracted from the envelope before the transform
    bool windowed = false;
    LineshapeResult lineshape;
};

struct LinewidthOptions {
    /// Subtract the median of the outer `background_fraction` of samples on both sides.
    bool subtract_background = true;
    double background_fraction = 0.1;
    LineshapeOptions lineshape{};
};

[[nodiscard]] LinewidthReport infer_linewidth(const TedTrace& envelope, double idler_nm, const LinewidthOptions& opt = {});

/// Results of the spectrogram pipeline.
struct SpectrogramAnalysis {
    Marginals marginals;
    double idler_nm = 0.0;  ///< column used for the TED
    TedTrace envelope;
    LinewidthReport linewidth;
};

struct SpectrogramAnalysisOptions {
    std::optional<Window> lambda_window;
    std::optional<Window> t_window;
    /// Idler column; default is the maximum of the spectral marginal.
    std::optional<double> idler_nm;
    int group_size = 100;
    LinewidthOptions linewidth{};
};

[[nodiscard]] SpectrogramAnalysis analyze_spectrogram(const Spectrogram2D& sg, const SpectrogramAnalysisOptions& opt = {});

/// Forward model of a measured spectrogram.
///
/// The signal filter passes a Gaussian band (FWHM `signal_fwhm_nm`) whose energy-conserving
/// image at the idler is broadened by the monochromator resolution. The TED is the
/// two-sided exponential of a Lorentzian line of FWHM `linewidth_hz`. Counts are Poisson.
struct SyntheticSpectrogramSpec {
    double pump_nm = 1550.92;
    double signal_nm = 1539.77;
    double signal_fwhm_nm = 0.57;
    double resolution_hz = 39e9;      ///< monochromator FWHM
    double lambda_half_span_nm = 1.5;
    int n_lambda = 61;
    double linewidth_hz = 3.376e6;
    double t_half_span_s = 0.0;       ///< 0: ten 1/e half-widths
    int n_t = 10000;
    double t_offset_s = 0.0;
    double peak_counts = 50.0;        ///< mean counts at the spectral and temporal maximum
    double background_counts = 0.0;   ///< mean accidental counts per bin
    std::uint64_t seed = 1;
};

[[nodiscard]] Spectrogram2D synthetic_spectrogram(const SyntheticSpectrogramSpec& spec);

}  // namespace wgm
