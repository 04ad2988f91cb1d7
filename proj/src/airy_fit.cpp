#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "wgm/cavity.hpp"
#include "wgm/numeric.hpp"

namespace wgm {

namespace {

// Parameters, scaled by the initial guess: (center - c0) / w0, fwhm / w0, depth, offset.
struct DipModel : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& f;
    const Eigen::VectorXd& y;
    double c0, w0, fsr;

    DipModel(const Eigen::VectorXd& f_, const Eigen::VectorXd& y_, double c0_, double w0_, double fsr_)
        : DenseFunctor(4, static_cast<int>(f_.size())), f(f_), y(y_), c0(c0_), w0(w0_), fsr(fsr_) {}

    int operator()(const InputType& p, ValueType& r) const {
        const double fc = c0 + p[0] * w0;
        const double w = std::abs(p[1]) * w0;
        const double sb = std::sin(kPi * w / (2.0 * fsr));
        const double F = 1.0 / (sb * sb);
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            const double s = std::sin(kPi * (f[i] - fc) / fsr);
            r[i] = p[3] + p[2] / (1.0 + F * s * s) - y[i];
        }
        return 0;
    }

    int df(const InputType& p, JacobianType& J) const {
        const double fc = c0 + p[0] * w0;
        const double w = std::abs(p[1]) * w0;
        const double beta = kPi * w / (2.0 * fsr);
        const double sb = std::sin(beta);
        const double F = 1.0 / (sb * sb);
        const double dF_dw = -2.0 * std::cos(beta) / (sb * sb * sb) * kPi / (2.0 * fsr);
        const double sign = p[1] < 0 ? -1.0 : 1.0;
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            const double th = kPi * (f[i] - fc) / fsr;
            const double s = std::sin(th);
            const double den = 1.0 + F * s * s;
            const double d2 = den * den;
            J(i, 0) = p[2] * F * 2.0 * s * std::cos(th) * kPi / fsr / d2 * w0;
            J(i, 1) = -p[2] * s * s * dF_dw / d2 * w0 * sign;
            J(i, 2) = 1.0 / den;
            J(i, 3) = 1.0;
        }
        return 0;
    }
};

}  // namespace

AiryFitResult fit_airy(const TransmissionScan& scan, const AiryFitOptions& opt) {
    const Eigen::Index n = scan.freq_offset_hz.size();
    if (n != scan.transmittance.size() || n < 20) throw PreconditionError("fit_airy: need >= 20 paired samples");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(scan.freq_offset_hz[i] > scan.freq_offset_hz[i - 1]))
            throw PreconditionError("fit_airy: frequency axis must be strictly increasing");

    std::vector<double> t(scan.transmittance.data(), scan.transmittance.data() + n);
    std::sort(t.begin(), t.end());
    const std::size_t decile = std::max<std::size_t>(1, t.size() / 10);
    const double baseline = median(std::vector<double>(t.end() - static_cast<std::ptrdiff_t>(decile), t.end()));
    const Eigen::VectorXd y = baseline - scan.transmittance.array();

    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 1; i < n; ++i) diffs.push_back(y[i] - y[i - 1]);
    const double md = median(diffs);
    for (double& d : diffs) d = std::abs(d - md);
    const double noise = 1.4826 * median(diffs) / std::sqrt(2.0);

    Eigen::Index imax = 0;
    const double ymax = y.maxCoeff(&imax);
    if (!(ymax > 3.0 * noise) || !(ymax > 0.0)) throw PreconditionError("fit_airy: no dip above 3x the noise floor");

    const double c0 = scan.freq_offset_hz[imax];
    double w0 = 0.0;
    try {
        w0 = sampled_fwhm(scan.freq_offset_hz, y);
    } catch (const PreconditionError&) {
        throw PreconditionError("fit_airy: dip not bracketed by half-maximum crossings");
    }
    const auto inside =
        ((scan.freq_offset_hz.array() - c0).abs() <= w0).count();
    if (inside < 20) throw PreconditionError("fit_airy: fewer than 20 samples across the dip");

    DipModel model(scan.freq_offset_hz, y, c0, w0, opt.fsr_hz);
    Eigen::VectorXd p(4);
    p << 0.0, 1.0, ymax, 0.0;
    Eigen::LevenbergMarquardt<DipModel> lm(model);
    lm.setMaxfev(opt.max_iterations * 10);
    lm.setXtol(1e-12);
    lm.setFtol(1e-12);
    const auto status = lm.minimize(p);
    if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
        status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
        throw ConvergenceError("fit_airy: Levenberg-Marquardt did not converge");

    Eigen::VectorXd r(n);
    model(p, r);
    Eigen::MatrixXd J(n, 4);
    model.df(p, J);
    const double ssr = r.squaredNorm();
    const double s2 = ssr / static_cast<double>(n - 4);
    const Eigen::MatrixXd cov = s2 * (J.transpose() * J).inverse();

    AiryFitResult out;
    out.center_hz = c0 + p[0] * w0;
    out.center_sigma_hz = std::sqrt(cov(0, 0)) * w0;
    out.fwhm_hz = std::abs(p[1]) * w0;
    out.fwhm_sigma_hz = std::sqrt(cov(1, 1)) * w0;
    out.depth = p[2];
    out.depth_sigma = std::sqrt(cov(2, 2));
    out.offset = p[3];
    out.baseline = baseline;
    out.noise_floor = noise;
    out.rms_residual = std::sqrt(ssr / static_cast<double>(n));
    out.iterations = static_cast<int>(lm.iterations());
    return out;
}

}  // namespace wgm
