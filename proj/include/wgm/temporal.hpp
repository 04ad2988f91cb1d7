#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgm/numeric.hpp"
#include "wgm/sfwm.hpp"

namespace wgm {

/// Time-of-emission-difference distribution on a uniform T grid.
///
/// Traces obtained by Fourier transform keep the imaginary part in `imag` so
/// the inverse transform is exact; `values` is the real part.
struct TedTrace {
    double t_start = 0.0;  ///< s
    double t_step = 0.0;   ///< s
    Eigen::VectorXd values;
    Eigen::VectorXd sigma;  ///< per-bin standard deviation; empty if absent
    Eigen::VectorXd imag;   ///< empty for measured traces
    double t_offset = 0.0;  ///< constant delay of the T axis, e.g. a fibre spool (s)
    double spectral_origin = 0.0;       ///< Omega of the first spectral sample (rad/s)
    Eigen::Index spectral_size = 0;     ///< sample count of the source spectrum
    double imag_residual = 0.0;         ///< max |imag| / max |values|
    bool truncated = false;             ///< set by block averaging that dropped samples

    [[nodiscard]] Eigen::Index size() const { return values.size(); }
    [[nodiscard]] double at(Eigen::Index i) const { return t_start + static_cast<double>(i) * t_step; }
    [[nodiscard]] Eigen::VectorXd times() const;

    /// CSV with header `T_us,value[,sigma]`.
    [[nodiscard]] static TedTrace read_csv(const std::string& path);
    void write_csv(const std::string& path) const;
};

/// R~(T) = (1/2pi) * integral R_i(Omega) e^{-i Omega T} dOmega on a grid centred at T = 0.
///
/// The spectrum is zero-padded to `pad` times the next power of two. Throws
/// PreconditionError when the spectrum has not decayed below 1e-6 of its maximum at
/// both edges or spans fewer than 20 peak FWHM.
[[nodiscard]] TedTrace ted_from_spectrum(const BiphotonSpectrum& s, int pad = 4);

/// R(Omega) = integral R~(T) e^{i Omega T} dT; inverse of `ted_from_spectrum`.
///
/// The output grid starts at `ted.spectral_origin`; it is truncated to
/// `ted.spectral_size` samples when that is set.
[[nodiscard]] BiphotonSpectrum spectrum_from_ted(const TedTrace& ted);

/// Spectrum decomposed as R = H * (h conv comb).
struct CombDecomposition {
    double spacing = 0.0;              ///< delta Omega (rad/s)
    double anchor = 0.0;               ///< Omega of the tallest peak; comb teeth at anchor + m spacing
    std::vector<double> peak_omega;    ///< refined peak positions
    std::vector<double> peak_height;
    Pchip envelope;                    ///< H(Omega) through the peak maxima
    Eigen::VectorXd h_offset;          ///< Omega offsets of the single-peak profile (rad/s)
    Eigen::VectorXd h;                 ///< single-peak profile, unit maximum
    double reconstruction_error = 0.0; ///< sup |R - model| / max R

    /// H * (h conv comb) at Omega.
    [[nodiscard]] double model(double omega) const;
    [[nodiscard]] double h_at(double offset) const;
};

/// Comb decomposition from >= 5 resolved peaks. If `expected_spacing` > 0 the
/// recovered spacing must lie within 5% of it.
[[nodiscard]] CombDecomposition comb_decompose(const BiphotonSpectrum& s, double expected_spacing = 0.0);

/// Envelope of an oscillating trace: monotone cubic through the maxima of |R~|.
///
/// With `period` > 0 (the round-trip time) one maximum is taken per period-wide window
/// around the global maximum; otherwise every local maximum is used.
[[nodiscard]] TedTrace tooth_envelope(const TedTrace& ted, double period = 0.0);

/// Full width of the main peak at 1/e of its maximum (same units as x).
[[nodiscard]] double efold_width(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Result of inferring a comb-peak lineshape from a TED envelope.
struct LineshapeResult {
    Eigen::VectorXd omega;  ///< rad/s, centred on 0
    Eigen::VectorXd h;      ///< real part, unit maximum
    double fwhm_hz = 0.0;
    double ted_fwhm_s = 0.0;
    double ted_efold_s = 0.0;  ///< full width at 1/e
    double t_center = 0.0;     ///< T of the envelope maximum that was moved to 0
    bool windowed = false;     ///< a Tukey window was applied against leakage
};

struct LineshapeOptions {
    bool recenter = true;
    int min_fft_size = 1 << 16;
    double leakage_threshold = 0.05;  ///< edge level (relative to peak) above which the window is applied
};

/// h(Omega) as the Fourier transform of an isolated TED envelope, and its FWHM.
[[nodiscard]] LineshapeResult infer_peak_lineshape(const TedTrace& envelope, const LineshapeOptions& opt = {});

/// Fixed-FSR comb model of the TED, R~(T) = h~(T) * sum_m H(Omega_m) e^{-i Omega_m T}, on the
/// T grid of `like`. Requires h~ at least 10 times wider than one tooth of the envelope transform.
[[nodiscard]] TedTrace ted_comb_model(const CombDecomposition& cd, double spectrum_step, const TedTrace& like);

namespace detail {
/// (step/2pi) * sum_k v_k e^{-i (start + k step) T_j} on the centred grid T_j = (j - M/2) 2pi / (M step).
void forward_transform(double start, double step, const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index m,
                       Eigen::VectorXd& re, Eigen::VectorXd& im);
}  // namespace detail

}  // namespace wgm
