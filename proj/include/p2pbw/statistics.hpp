#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "p2pbw/bandwidth.hpp"
#include "p2pbw/trace.hpp"
#include "p2pbw/traffic_model.hpp"

namespace p2pbw {

// Empirical mean/variance of a trace with standard errors. The mean and
// variance standard errors come from a circular block bootstrap (block
// length N^0.6) because plain 1/sqrt(N) errors are invalid under
// long-range dependence.
struct MomentReport {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
    double mean_se = 0.0;
    double variance_se = 0.0;
};

inline constexpr std::uint64_t kDefaultBootstrapSeed = 0x5bd1e995u;

MomentReport sample_moments(const Trace& trace,
                            std::uint64_t bootstrap_seed = kDefaultBootstrapSeed);

// Biased (1/N) sample autocovariance at lags 0..max_lag. The 1/N
// normalization keeps the lag sequence positive semidefinite;
// element 0 is the 1/N-normalized sample variance.
std::vector<double> sample_autocovariance(const Trace& trace, std::size_t max_lag);

// Mean/variance of one factor process (traffic B or peer path S).
struct FactorMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Closed-form model moments, evaluated verbatim:
//   mean     = gamma * (E(B) + E(S)) + sigma * K'
//   variance = gamma * (Var(B) + Var(S)) + sigma * K'
// These are the model's printed expressions, not estimators; empirical
// agreement is reported separately, never asserted.
struct PaperMoments {
    double mean = 0.0;
    double variance = 0.0;
};

PaperMoments paper_moment_formulas(const BandwidthSpec& spec, FactorMoments traffic,
                                   FactorMoments ou);

struct ComponentMomentInput {
    BandwidthSpec spec;
    FactorMoments traffic;
    FactorMoments ou;
};

// Componentwise sum of the individual closed-form moments.
PaperMoments aggregate_paper_moments(const std::vector<ComponentMomentInput>& components);

// H = (4 - min(n0, n1))/2 + epsilon. Requires min(n0, n1) in (2,3] and
// the slack-adjusted H inside [1/2, 1).
double hurst_from_indices(const TrafficIndices& indices, double epsilon);

// Three-term autocovariance model ACV(k) = C1*k^(2(H-1)) + C2*e^(-lambda*k) + C3
// fitted over lag indices k = 1..len-1 (element 0 of the input is the lag-0
// value and does not enter the fit). lambda is a per-lag decay rate; divide
// by dt for a per-time rate.
struct AcvModelFit {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double lambda = 0.0; // per lag, > 0
    double hurst = 0.0;  // in (1/2, 1)
    double residual = 0.0; // sum of squared fit errors
    double dt = 0.0;
    bool converged = false;
    bool degenerate = false; // C1 and C2 both negligible (constant input)
};

AcvModelFit fit_acv_model(const std::vector<double>& acv, double dt);

// Partial-sum and log-log decay diagnostics of an autocovariance series.
// partial_sums[t] = sum of acv[1..t+1]; the decay exponent comes from a
// log-log regression of |acv(k)| on k over the upper half of the lags,
// where the short-range e^(-lambda*k) term has died out. The sum of a
// power-law tail k^p diverges iff p > -1.
struct LrdDiagnostic {
    std::vector<double> partial_sums;
    bool diverges = false;
    double fitted_exponent = 0.0;
    double hurst_estimate = 0.0; // exponent = 2(H-1)
    bool reliable = true;        // false when the regression window has
                                 // non-positive values (regression ran on |.|)
};

LrdDiagnostic lrd_diagnostic(const std::vector<double>& acv);

} // namespace p2pbw
