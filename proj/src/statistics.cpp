#include "p2pbw/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "p2pbw/errors.hpp"
#include "p2pbw/rng.hpp"

namespace p2pbw {

namespace {

// Ordinary least squares y = intercept + slope*x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

} // namespace

MomentReport sample_moments(const Trace& trace, std::uint64_t bootstrap_seed) {
    trace.validate();
    const std::size_t n = trace.size();
    if (n < 2)
        throw std::invalid_argument("sample_moments: trace must hold at least 2 samples");

    double sum = 0.0;
    for (double v : trace.values)
        sum += v;
    const double mean = sum / static_cast<double>(n);

    double ss = 0.0;
    for (double v : trace.values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double variance = ss / static_cast<double>(n - 1);

    MomentReport report;
    report.mean = mean;
    report.variance = variance;
    report.count = n;

    // Circular block bootstrap, block length N^0.6. Centering first keeps
    // the accumulators well conditioned.
    std::vector<double> centered(trace.values);
    for (double& v : centered)
        v -= mean;

    const std::size_t block =
        std::min<std::size_t>(n, std::max<std::size_t>(1, static_cast<std::size_t>(
            std::llround(std::pow(static_cast<double>(n), 0.6)))));
    const std::size_t nblocks = (n + block - 1) / block;
    constexpr std::size_t kResamples = 200;

    RngStream rng(bootstrap_seed);
    std::vector<double> means, variances;
    means.reserve(kResamples);
    variances.reserve(kResamples);
    for (std::size_t b = 0; b < kResamples; ++b) {
        double rsum = 0.0, rsumsq = 0.0;
        std::size_t taken = 0;
        for (std::size_t j = 0; j < nblocks && taken < n; ++j) {
            const std::size_t start =
                static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
            for (std::size_t k = 0; k < block && taken < n; ++k, ++taken) {
                const double v = centered[(start + k) % n];
                rsum += v;
                rsumsq += v * v;
            }
        }
        const double rmean = rsum / static_cast<double>(n);
        means.push_back(rmean);
        variances.push_back((rsumsq - static_cast<double>(n) * rmean * rmean) /
                            static_cast<double>(n - 1));
    }

    auto spread = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs)
            m += x;
        m /= static_cast<double>(xs.size());
        double s = 0.0;
        for (double x : xs) {
            const double d = x - m;
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(xs.size() - 1));
    };
    report.mean_se = spread(means);
    report.variance_se = spread(variances);
    return report;
}

std::vector<double> sample_autocovariance(const Trace& trace, std::size_t max_lag) {
    trace.validate();
    const std::size_t n = trace.size();
    if (4 * max_lag >= n)
        throw std::invalid_argument("sample_autocovariance: max_lag must be < length/4");

    double mean = 0.0;
    for (double v : trace.values)
        mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> acv(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i)
            s += (trace.values[i] - mean) * (trace.values[i + k] - mean);
        acv[k] = s / static_cast<double>(n);
    }
    return acv;
}

PaperMoments paper_moment_formulas(const BandwidthSpec& spec, FactorMoments traffic,
                                   FactorMoments ou) {
    spec.validate();
    const double gamma = spec.ou.gamma;
    const double sigma = spec.ou.sigma;
    PaperMoments moments;
    moments.mean = gamma * (traffic.mean + ou.mean) + sigma * spec.kprime;
    moments.variance = gamma * (traffic.variance + ou.variance) + sigma * spec.kprime;
    return moments;
}

PaperMoments aggregate_paper_moments(const std::vector<ComponentMomentInput>& components) {
    if (components.empty())
        throw std::invalid_argument("aggregate_paper_moments: at least one component required");
    PaperMoments total;
    for (const auto& c : components) {
        const PaperMoments m = paper_moment_formulas(c.spec, c.traffic, c.ou);
        total.mean += m.mean;
        total.variance += m.variance;
    }
    return total;
}

double hurst_from_indices(const TrafficIndices& indices, double epsilon) {
    indices.validate();
    const double m = indices.min_index();
    if (!(m > 2.0 && m <= 3.0))
        throw std::invalid_argument("hurst_from_indices: min(n0,n1) must lie in (2,3], got " +
                                    std::to_string(m));
    if (!(std::isfinite(epsilon) && epsilon >= 0.0))
        throw std::invalid_argument("hurst_from_indices: epsilon must be finite and >= 0");
    const double hurst = (4.0 - m) / 2.0 + epsilon;
    if (!(hurst < 1.0))
        throw std::invalid_argument("hurst_from_indices: H + epsilon must stay below 1, got " +
                                    std::to_string(hurst));
    return hurst;
}

namespace {

// ---- three-term ACV model fit -----------------------------------------
//
// For fixed (H, lambda) the model is linear in (C1, C2, C3); the linear
// subproblem is solved exactly and a damped Gauss-Newton iteration handles
// the two nonlinear parameters. Deterministic multi-starts cover the
// (H, lambda) box corners.

constexpr double kHurstLo = 0.5 + 1e-9;
constexpr double kHurstHi = 1.0 - 1e-9;
constexpr double kLambdaLo = 1e-9;
constexpr double kLambdaHi = 60.0;

struct LinearSolve {
    std::array<double, 3> coeff{};
    double ssr = 0.0;
};

// Least squares of y on [k^(2(H-1)), e^(-lambda k), 1] via normal equations;
// a tiny ridge keeps near-collinear bases (H -> 1 or lambda -> 0) solvable.
LinearSolve solve_linear(const std::vector<double>& y, double hurst, double lambda) {
    const std::size_t m = y.size(); // y[j] is the value at lag j+1
    std::array<std::array<double, 3>, 3> g{};
    std::array<double, 3> b{};
    std::vector<std::array<double, 3>> basis(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double k = static_cast<double>(j + 1);
        basis[j] = {std::pow(k, 2.0 * (hurst - 1.0)), std::exp(-lambda * k), 1.0};
        for (int r = 0; r < 3; ++r) {
            b[r] += basis[j][r] * y[j];
            for (int c = 0; c < 3; ++c)
                g[r][c] += basis[j][r] * basis[j][c];
        }
    }
    const double ridge = 1e-12 * (g[0][0] + g[1][1] + g[2][2]);
    for (int r = 0; r < 3; ++r)
        g[r][r] += ridge;

    // Gaussian elimination with partial pivoting.
    std::array<std::array<double, 4>, 3> aug{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c)
            aug[r][c] = g[r][c];
        aug[r][3] = b[r];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col]))
                pivot = r;
        std::swap(aug[col], aug[pivot]);
        if (aug[col][col] == 0.0)
            continue;
        for (int r = col + 1; r < 3; ++r) {
            const double f = aug[r][col] / aug[col][col];
            for (int c = col; c < 4; ++c)
                aug[r][c] -= f * aug[col][c];
        }
    }
    LinearSolve out;
    for (int r = 2; r >= 0; --r) {
        double s = aug[r][3];
        for (int c = r + 1; c < 3; ++c)
            s -= aug[r][c] * out.coeff[c];
        out.coeff[r] = (aug[r][r] != 0.0) ? s / aug[r][r] : 0.0;
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double fit = out.coeff[0] * basis[j][0] + out.coeff[1] * basis[j][1] +
                           out.coeff[2] * basis[j][2];
        const double r = y[j] - fit;
        out.ssr += r * r;
    }
    return out;
}

struct NonlinearRun {
    double hurst = 0.0;
    double lambda = 0.0;
    LinearSolve linear;
    bool converged = false;
};

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Residual vector for the Jacobian; shares the linear solve.
void residuals(const std::vector<double>& y, double hurst, double lambda,
               std::vector<double>& out) {
    const LinearSolve sol = solve_linear(y, hurst, lambda);
    out.resize(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double k = static_cast<double>(j + 1);
        const double fit = sol.coeff[0] * std::pow(k, 2.0 * (hurst - 1.0)) +
                           sol.coeff[1] * std::exp(-lambda * k) + sol.coeff[2];
        out[j] = y[j] - fit;
    }
}

NonlinearRun run_from_start(const std::vector<double>& y, double h0, double l0) {
    NonlinearRun run;
    run.hurst = clamp(h0, kHurstLo, kHurstHi);
    run.lambda = clamp(l0, kLambdaLo, kLambdaHi);
    run.linear = solve_linear(y, run.hurst, run.lambda);

    double damping = 1e-3;
    std::vector<double> r0, rp, rm;
    for (int iter = 0; iter < 120; ++iter) {
        residuals(y, run.hurst, run.lambda, r0);

        // Central-difference Jacobian in (H, lambda).
        const double hH = 1e-6;
        const double hL = 1e-6 * std::max(1.0, run.lambda);
        std::vector<std::array<double, 2>> jac(y.size());
        residuals(y, clamp(run.hurst + hH, kHurstLo, kHurstHi), run.lambda, rp);
        residuals(y, clamp(run.hurst - hH, kHurstLo, kHurstHi), run.lambda, rm);
        for (std::size_t j = 0; j < y.size(); ++j)
            jac[j][0] = (rp[j] - rm[j]) / (2.0 * hH);
        residuals(y, run.hurst, clamp(run.lambda + hL, kLambdaLo, kLambdaHi), rp);
        residuals(y, run.hurst, clamp(run.lambda - hL, kLambdaLo, kLambdaHi), rm);
        for (std::size_t j = 0; j < y.size(); ++j)
            jac[j][1] = (rp[j] - rm[j]) / (2.0 * hL);

        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            jtj00 += jac[j][0] * jac[j][0];
            jtj01 += jac[j][0] * jac[j][1];
            jtj11 += jac[j][1] * jac[j][1];
            jtr0 += jac[j][0] * r0[j];
            jtr1 += jac[j][1] * r0[j];
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            const double a00 = jtj00 + damping * (1.0 + jtj00);
            const double a11 = jtj11 + damping * (1.0 + jtj11);
            const double det = a00 * a11 - jtj01 * jtj01;
            if (det == 0.0 || !std::isfinite(det)) {
                damping *= 4.0;
                continue;
            }
            const double dh = -(a11 * jtr0 - jtj01 * jtr1) / det;
            const double dl = -(a00 * jtr1 - jtj01 * jtr0) / det;
            const double h_try = clamp(run.hurst + dh, kHurstLo, kHurstHi);
            const double l_try = clamp(run.lambda + dl, kLambdaLo, kLambdaHi);
            const LinearSolve trial = solve_linear(y, h_try, l_try);
            if (trial.ssr <= run.linear.ssr) {
                const double step = std::fabs(h_try - run.hurst) + std::fabs(l_try - run.lambda);
                const double gain = run.linear.ssr - trial.ssr;
                run.hurst = h_try;
                run.lambda = l_try;
                run.linear = trial;
                damping = std::max(damping / 3.0, 1e-12);
                accepted = true;
                if (step < 1e-11 || gain <= 1e-15 * (1.0 + run.linear.ssr)) {
                    run.converged = true;
                    return run;
                }
                break;
            }
            damping *= 4.0;
        }
        if (!accepted) {
            // Damping exhausted: the iterate is already a local minimum.
            run.converged = true;
            return run;
        }
    }
    return run;
}

} // namespace

AcvModelFit fit_acv_model(const std::vector<double>& acv, double dt) {
    if (acv.size() < 10)
        throw std::invalid_argument("fit_acv_model: series must hold at least 10 values");
    if (!(std::isfinite(dt) && dt > 0.0))
        throw std::invalid_argument("fit_acv_model: dt must be finite and > 0");
    for (double v : acv)
        if (!std::isfinite(v))
            throw std::invalid_argument("fit_acv_model: series must be finite");

    const std::vector<double> y(acv.begin() + 1, acv.end());

    static constexpr double kStartHurst[] = {0.55, 0.95};
    static constexpr double kStartLambda[] = {0.02, 0.2, 1.0, 3.0};

    NonlinearRun best;
    bool have_best = false;
    for (double h0 : kStartHurst) {
        for (double l0 : kStartLambda) {
            NonlinearRun run = run_from_start(y, h0, l0);
            const bool better =
                !have_best || run.linear.ssr < best.linear.ssr ||
                (run.linear.ssr == best.linear.ssr && run.hurst < best.hurst);
            if (better) {
                best = run;
                have_best = true;
            }
        }
    }

    AcvModelFit fit;
    fit.c1 = best.linear.coeff[0];
    fit.c2 = best.linear.coeff[1];
    fit.c3 = best.linear.coeff[2];
    fit.hurst = best.hurst;
    fit.lambda = best.lambda;
    fit.residual = best.linear.ssr;
    fit.dt = dt;
    fit.converged = best.converged;

    double scale = 1.0;
    for (double v : y)
        scale = std::max(scale, std::fabs(v));
    fit.degenerate = std::fabs(fit.c1) < 1e-8 * scale && std::fabs(fit.c2) < 1e-8 * scale;
    return fit;
}

LrdDiagnostic lrd_diagnostic(const std::vector<double>& acv) {
    if (acv.size() < 32)
        throw std::invalid_argument("lrd_diagnostic: series must hold at least 32 values");
    for (double v : acv)
        if (!std::isfinite(v))
            throw std::invalid_argument("lrd_diagnostic: series must be finite");

    const std::size_t max_lag = acv.size() - 1;

    LrdDiagnostic diag;
    diag.partial_sums.reserve(max_lag);
    double running = 0.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        running += acv[k];
        diag.partial_sums.push_back(running);
    }

    // Upper half of the lags: the short-range exponential term has decayed
    // there, leaving the power-law tail to dominate.
    const std::size_t k_lo = std::max<std::size_t>(1, max_lag / 2);
    std::vector<double> log_k, log_acv;
    bool all_positive = true;
    for (std::size_t k = k_lo; k <= max_lag; ++k) {
        if (acv[k] <= 0.0)
            all_positive = false;
        const double mag = std::fabs(acv[k]);
        if (mag > 0.0) {
            log_k.push_back(std::log(static_cast<double>(k)));
            log_acv.push_back(std::log(mag));
        }
    }
    diag.reliable = all_positive;

    if (log_k.size() < 4) {
        diag.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
        diag.hurst_estimate = std::numeric_limits<double>::quiet_NaN();
        diag.diverges = false;
        diag.reliable = false;
        return diag;
    }

    const LineFit fit = linear_fit(log_k, log_acv);
    diag.fitted_exponent = fit.slope;
    diag.hurst_estimate = 1.0 + fit.slope / 2.0;
    diag.diverges = fit.slope > -1.0;
    return diag;
}

} // namespace p2pbw
