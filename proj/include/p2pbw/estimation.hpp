#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "p2pbw/trace.hpp"

namespace p2pbw {

enum class EstimationMethod { exact_mle, paper_literal, ar1_oracle };

const char* to_string(EstimationMethod method);

// exact: transition densities plus the stationary density of the first
// sample. conditional: transition densities only; its maximizer coincides
// analytically with the AR(1) least-squares fit.
enum class LikelihoodForm { exact, conditional };

struct EstimationResult {
    double gamma_hat = 0.0;
    double sigma_hat = 0.0;
    double n_hat = 0.0;
    double log_likelihood = 0.0;
    EstimationMethod method = EstimationMethod::exact_mle;
    bool converged = false;
    int iterations = 0;
};

// Log-likelihood of a zero-mean mean-reverting path observed on a uniform
// grid. Both parameters must be strictly positive.
double ou_log_likelihood(const Trace& trace, double gamma, double sigma,
                         LikelihoodForm form = LikelihoodForm::exact);

// Maximum-likelihood (gamma, sigma) via profile search over A = e^(-gamma dt)
// on (0,1): sigma^2 has a closed form for each A, leaving a deterministic 1-D
// minimization refined to 1e-12. A solution pinned at either end of (0,1) is
// flagged non-converged.
EstimationResult estimate_gamma_sigma(const Trace& trace,
                                      LikelihoodForm form = LikelihoodForm::exact);

// All real roots of sum_i coeffs[i] * A^i inside the open interval (0,1),
// located by sign-change bracketing on a 10^4-point grid and bisected to
// 1e-12. Even-multiplicity roots produce no sign change and are not found.
std::vector<double> polynomial_roots_in_unit_interval(const std::vector<double>& coeffs);

// Candidate A values from the published quintic in A given a volatility
// guess; possibly empty. Each root maps to gamma via -ln(A)/dt.
std::vector<double> paper_literal_gamma_root(const Trace& trace, double sigma);

// The published closed-form sigma at a given A; nullopt when the radicand is
// negative (no admissible solution).
std::optional<double> paper_literal_sigma(const Trace& trace, double a_value);

// Alternates the quintic root for A and the closed-form sigma to a fixed
// point (tolerance 1e-10, at most 200 rounds). Kept separate from
// estimate_gamma_sigma: the published algebra differs from the exact
// likelihood, and the two methods are reported side by side, never merged.
EstimationResult paper_literal_estimate(const Trace& trace);

// Least-squares AR(1) fit: A = sum x_k x_{k-1} / sum x_{k-1}^2, gamma and
// sigma mapped through the transition law. Serves as an independent
// closed-form cross-check on the likelihood search.
EstimationResult ar1_oracle(const Trace& trace);

// Tail-index estimate 1 + N / sum ln(x_j / a) for samples from a power law
// with known lower cutoff a.
double estimate_powerlaw_index(const std::vector<double>& samples, double a);

// Composite estimate over separately observed factors. Failures in one part
// leave the other intact; error strings name the affected parameters.
struct CompositeEstimate {
    std::optional<EstimationResult> ou;
    std::string ou_error;
    std::optional<double> n_hat;
    std::string traffic_error;
};

CompositeEstimate estimate_all(const Trace& ou_trace, const std::vector<double>& traffic_samples,
                               double a);

} // namespace p2pbw
