#include "p2pbw/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "p2pbw/errors.hpp"

namespace p2pbw {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Sufficient statistics of the lag-1 structure: S(A) = sum (x_k - A x_{k-1})^2
// expands to sxx - 2A sxy + A^2 syy, so every candidate A costs O(1).
struct LagSums {
    double x0_sq = 0.0;
    double sxx = 0.0; // sum_{k>=1} x_k^2
    double sxy = 0.0; // sum_{k>=1} x_k x_{k-1}
    double syy = 0.0; // sum_{k>=1} x_{k-1}^2
    double sx = 0.0;  // sum_{k>=1} x_k
    std::size_t n = 0;
};

LagSums lag_sums(const Trace& trace) {
    LagSums s;
    s.n = trace.size() - 1;
    s.x0_sq = trace.values[0] * trace.values[0];
    for (std::size_t k = 1; k < trace.size(); ++k) {
        const double xk = trace.values[k];
        const double xp = trace.values[k - 1];
        s.sxx += xk * xk;
        s.sxy += xk * xp;
        s.syy += xp * xp;
        s.sx += xk;
    }
    return s;
}

double residual_sum(const LagSums& s, double a) {
    return std::max(0.0, s.sxx - 2.0 * a * s.sxy + a * a * s.syy);
}

bool all_zero(const Trace& trace) {
    for (double v : trace.values)
        if (v != 0.0)
            return false;
    return true;
}

// Golden-section minimization on [lo, hi]; deterministic, interval shrunk
// below tol.
template <typename F>
double golden_minimize(F&& f, double lo, double hi, double tol, int& iterations) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    iterations = 0;
    while (b - a > tol && iterations < 300) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++iterations;
    }
    return 0.5 * (a + b);
}

constexpr double kSearchLo = 1e-9;
constexpr double kSearchHi = 1.0 - 1e-9;
constexpr double kSearchTol = 1e-12;

// Negative profile log-likelihood in A, up to constants. The per-A variance
// maximizer is plugged in, so only A remains.
double profile_objective(const LagSums& s, double a, LikelihoodForm form) {
    const double one_minus = 1.0 - a * a;
    const double n = static_cast<double>(s.n);
    const double resid = residual_sum(s, a);
    if (form == LikelihoodForm::conditional) {
        return resid > 0.0 ? std::log(resid)
                           : -std::numeric_limits<double>::infinity();
    }
    const double v = (s.x0_sq + resid / one_minus) / (n + 1.0);
    if (!(v > 0.0))
        return -std::numeric_limits<double>::infinity();
    return (n + 1.0) * std::log(v) + n * std::log(one_minus);
}

} // namespace

const char* to_string(EstimationMethod method) {
    switch (method) {
    case EstimationMethod::exact_mle:
        return "exact_mle";
    case EstimationMethod::paper_literal:
        return "paper_literal";
    case EstimationMethod::ar1_oracle:
        return "ar1_oracle";
    }
    return "unknown";
}

double ou_log_likelihood(const Trace& trace, double gamma, double sigma, LikelihoodForm form) {
    trace.validate();
    if (trace.size() < 2)
        throw std::invalid_argument("ou_log_likelihood: trace must hold at least 2 samples");
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw std::invalid_argument("ou_log_likelihood: gamma must be finite and > 0");
    if (!(std::isfinite(sigma) && sigma > 0.0))
        throw std::invalid_argument("ou_log_likelihood: sigma must be finite and > 0");

    const double a = std::exp(-gamma * trace.dt);
    const double v = sigma * sigma / (2.0 * gamma);
    const double w = v * (1.0 - a * a);
    const double log2pi = std::log(2.0 * std::numbers::pi);

    const LagSums s = lag_sums(trace);
    const double n = static_cast<double>(s.n);
    double ll = -0.5 * n * (log2pi + std::log(w)) - residual_sum(s, a) / (2.0 * w);
    if (form == LikelihoodForm::exact)
        ll += -0.5 * (log2pi + std::log(v)) - s.x0_sq / (2.0 * v);
    return ll;
}

EstimationResult estimate_gamma_sigma(const Trace& trace, LikelihoodForm form) {
    trace.validate();
    if (trace.size() < 10)
        throw std::invalid_argument("estimate_gamma_sigma: trace must hold at least 10 samples");
    if (all_zero(trace))
        throw degenerate_data_error("estimate_gamma_sigma: trace is identically zero");

    const LagSums s = lag_sums(trace);
    const auto objective = [&](double a) { return profile_objective(s, a, form); };

    // Coarse grid to locate the basin, then golden-section refinement.
    constexpr int kGridPoints = 1000;
    int best_index = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGridPoints; ++i) {
        const double a = kSearchLo + (kSearchHi - kSearchLo) * i / kGridPoints;
        const double value = objective(a);
        if (value < best_value) {
            best_value = value;
            best_index = i;
        }
    }
    const double bracket_lo =
        kSearchLo + (kSearchHi - kSearchLo) * std::max(0, best_index - 1) / kGridPoints;
    const double bracket_hi =
        kSearchLo + (kSearchHi - kSearchLo) * std::min(kGridPoints, best_index + 1) / kGridPoints;

    int iterations = 0;
    const double a_hat = golden_minimize(objective, bracket_lo, bracket_hi, kSearchTol, iterations);

    EstimationResult result;
    result.method = EstimationMethod::exact_mle;
    result.iterations = iterations;
    result.gamma_hat = -std::log(a_hat) / trace.dt;

    const double n = static_cast<double>(s.n);
    const double one_minus = 1.0 - a_hat * a_hat;
    const double v = form == LikelihoodForm::exact
                         ? (s.x0_sq + residual_sum(s, a_hat) / one_minus) / (n + 1.0)
                         : residual_sum(s, a_hat) / (n * one_minus);
    result.sigma_hat = std::sqrt(2.0 * result.gamma_hat * v);
    result.converged = a_hat > kSearchLo + 10.0 * kSearchTol &&
                       a_hat < kSearchHi - 10.0 * kSearchTol &&
                       std::isfinite(result.gamma_hat) && std::isfinite(result.sigma_hat);
    result.n_hat = kNan;
    result.log_likelihood = (result.gamma_hat > 0.0 && result.sigma_hat > 0.0)
                                ? ou_log_likelihood(trace, result.gamma_hat, result.sigma_hat, form)
                                : kNan;
    return result;
}

std::vector<double> polynomial_roots_in_unit_interval(const std::vector<double>& coeffs) {
    if (coeffs.empty())
        throw std::invalid_argument("polynomial_roots_in_unit_interval: empty coefficients");
    for (double c : coeffs)
        if (!std::isfinite(c))
            throw std::invalid_argument("polynomial_roots_in_unit_interval: non-finite coefficient");

    const auto eval = [&](double a) {
        double p = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;)
            p = p * a + coeffs[i];
        return p;
    };

    constexpr int kIntervals = 10000;
    constexpr double kTol = 1e-12;
    std::vector<double> roots;
    double prev_a = 0.0;
    double prev_p = eval(prev_a);
    for (int i = 1; i <= kIntervals; ++i) {
        const double a = static_cast<double>(i) / kIntervals;
        const double p = eval(a);
        if (p == 0.0) {
            if (a < 1.0)
                roots.push_back(a);
        } else if (prev_p != 0.0 && std::signbit(p) != std::signbit(prev_p)) {
            double lo = prev_a, hi = a;
            double flo = prev_p;
            while (hi - lo > kTol) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = eval(mid);
                if (fmid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(fmid) == std::signbit(flo)) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            if (root > 0.0 && root < 1.0)
                roots.push_back(root);
        }
        prev_a = a;
        prev_p = p;
    }
    return roots;
}

std::vector<double> paper_literal_gamma_root(const Trace& trace, double sigma) {
    trace.validate();
    if (trace.size() < 2)
        throw std::invalid_argument("paper_literal_gamma_root: trace must hold at least 2 samples");
    if (!(std::isfinite(sigma) && sigma > 0.0))
        throw std::invalid_argument("paper_literal_gamma_root: sigma must be finite and > 0");

    const LagSums s = lag_sums(trace);
    const double n = static_cast<double>(s.n);
    const double sigma4 = sigma * sigma * sigma * sigma;
    const double c1 = n * sigma4;
    const double c2 = 2.0 * c1;
    const double c3 = s.syy;
    const double c4 = c1 - c3;
    const double c5 = sigma * sigma * c3;
    // c1 A^5 - c2 A^3 + c3 A^2 + c4 A - c5, ascending coefficients.
    return polynomial_roots_in_unit_interval({-c5, c4, c3, -c2, 0.0, c1});
}

std::optional<double> paper_literal_sigma(const Trace& trace, double a_value) {
    trace.validate();
    if (trace.size() < 2)
        throw std::invalid_argument("paper_literal_sigma: trace must hold at least 2 samples");
    if (!(std::isfinite(a_value) && a_value > 0.0 && a_value < 1.0))
        throw std::invalid_argument("paper_literal_sigma: A must lie in (0,1)");

    const LagSums s = lag_sums(trace);
    const double n = static_cast<double>(s.n);
    const double one_minus = 1.0 - a_value * a_value;
    // Published form: note the linear sum of x_k in the numerator.
    const double numerator = 2.0 * s.x0_sq * one_minus + 2.0 * s.sx - 2.0 * a_value * s.syy;
    const double radicand = numerator / ((n + 1.0) * one_minus);
    if (radicand < 0.0)
        return std::nullopt;
    return std::sqrt(radicand);
}

EstimationResult paper_literal_estimate(const Trace& trace) {
    trace.validate();
    if (trace.size() < 3)
        throw std::invalid_argument("paper_literal_estimate: trace must hold at least 3 samples");
    if (all_zero(trace))
        throw degenerate_data_error("paper_literal_estimate: trace is identically zero");

    // Starting volatility: sample standard deviation. Starting A reference:
    // the AR(1) coefficient when admissible, 0.5 otherwise; each round picks
    // the quintic root nearest the previous A.
    const LagSums s = lag_sums(trace);
    const std::size_t count = trace.size();
    double mean = 0.0;
    for (double v : trace.values)
        mean += v;
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (double v : trace.values) {
        const double d = v - mean;
        ss += d * d;
    }
    double sigma = std::sqrt(ss / static_cast<double>(count - 1));

    EstimationResult result;
    result.method = EstimationMethod::paper_literal;
    result.n_hat = kNan;

    if (!(sigma > 0.0))
        throw degenerate_data_error("paper_literal_estimate: trace is constant");

    double a_ref = s.syy > 0.0 ? s.sxy / s.syy : 0.5;
    if (!(a_ref > 0.0 && a_ref < 1.0))
        a_ref = 0.5;

    constexpr int kMaxRounds = 200;
    constexpr double kFixedPointTol = 1e-10;
    double a_current = a_ref;
    bool have_a = false;
    for (int round = 0; round < kMaxRounds; ++round) {
        result.iterations = round + 1;
        const std::vector<double> roots = paper_literal_gamma_root(trace, sigma);
        if (roots.empty())
            break;
        double picked = roots.front();
        for (double r : roots)
            if (std::fabs(r - a_current) < std::fabs(picked - a_current))
                picked = r;

        const std::optional<double> next_sigma = paper_literal_sigma(trace, picked);
        if (!next_sigma.has_value()) {
            a_current = picked;
            have_a = true;
            break;
        }
        const double da = std::fabs(picked - a_current);
        const double dsigma = std::fabs(*next_sigma - sigma);
        a_current = picked;
        have_a = true;
        sigma = *next_sigma;
        if (da <= kFixedPointTol && dsigma <= kFixedPointTol * std::max(1.0, sigma)) {
            result.converged = true;
            break;
        }
    }

    if (have_a) {
        result.gamma_hat = -std::log(a_current) / trace.dt;
        result.sigma_hat = sigma;
    } else {
        result.gamma_hat = kNan;
        result.sigma_hat = kNan;
        result.converged = false;
    }
    // Scored against the exact likelihood so methods are comparable.
    result.log_likelihood = (result.gamma_hat > 0.0 && result.sigma_hat > 0.0)
                                ? ou_log_likelihood(trace, result.gamma_hat, result.sigma_hat)
                                : kNan;
    return result;
}

EstimationResult ar1_oracle(const Trace& trace) {
    trace.validate();
    if (trace.size() < 3)
        throw std::invalid_argument("ar1_oracle: trace must hold at least 3 samples");

    const LagSums s = lag_sums(trace);
    EstimationResult result;
    result.method = EstimationMethod::ar1_oracle;
    result.n_hat = kNan;

    if (!(s.syy > 0.0)) {
        result.gamma_hat = kNan;
        result.sigma_hat = kNan;
        result.log_likelihood = kNan;
        return result;
    }
    const double a_hat = s.sxy / s.syy;
    if (!(a_hat > 0.0 && a_hat < 1.0)) {
        result.gamma_hat = kNan;
        result.sigma_hat = kNan;
        result.log_likelihood = kNan;
        return result;
    }

    const double n = static_cast<double>(s.n);
    result.gamma_hat = -std::log(a_hat) / trace.dt;
    const double resid_var = residual_sum(s, a_hat) / n;
    result.sigma_hat = std::sqrt(2.0 * result.gamma_hat * resid_var / (1.0 - a_hat * a_hat));
    result.converged = true;
    result.log_likelihood =
        (result.gamma_hat > 0.0 && result.sigma_hat > 0.0)
            ? ou_log_likelihood(trace, result.gamma_hat, result.sigma_hat,
                                LikelihoodForm::conditional)
            : kNan;
    return result;
}

double estimate_powerlaw_index(const std::vector<double>& samples, double a) {
    if (samples.empty())
        throw std::invalid_argument("estimate_powerlaw_index: no samples");
    if (!(std::isfinite(a) && a > 0.0))
        throw std::invalid_argument("estimate_powerlaw_index: cutoff must be finite and > 0");

    double log_sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = samples[i];
        if (!std::isfinite(x))
            throw std::invalid_argument("estimate_powerlaw_index: non-finite sample at index " +
                                        std::to_string(i));
        if (x < a)
            throw std::invalid_argument("estimate_powerlaw_index: sample at index " +
                                        std::to_string(i) + " lies below the cutoff");
        log_sum += std::log(x / a);
    }
    if (log_sum <= 0.0)
        throw divergent_estimate_error(
            "estimate_powerlaw_index: all samples equal the cutoff, index diverges");
    return 1.0 + static_cast<double>(samples.size()) / log_sum;
}

CompositeEstimate estimate_all(const Trace& ou_trace, const std::vector<double>& traffic_samples,
                               double a) {
    CompositeEstimate out;
    try {
        out.ou = estimate_gamma_sigma(ou_trace);
    } catch (const std::exception& e) {
        out.ou_error = std::string("gamma/sigma: ") + e.what();
    }
    try {
        out.n_hat = estimate_powerlaw_index(traffic_samples, a);
    } catch (const std::exception& e) {
        out.traffic_error = std::string("n: ") + e.what();
    }
    return out;
}

} // namespace p2pbw
