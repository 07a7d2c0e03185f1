#pragma once

#include <array>
#include <functional>
#include <vector>

#include "topseg/corpus.hpp"
#include "topseg/pairs.hpp"

namespace topseg {

using Vec = std::vector<double>;

inline constexpr double kProbClamp = 1e-7;  // probabilities clamped to [kProbClamp, 1-kProbClamp]

struct TsLoss {
    double value = 0.0;
    Vec grad_probs;  // d value / d p_i, evaluated at the clamped probabilities
};

struct TsspLoss {
    double value = 0.0;
    std::vector<std::array<double, 3>> grad_rows;  // -1/p at the true class, 0 elsewhere
};

struct CsslLoss {
    double value = 0.0;
    std::vector<Vec> grad_reps;   // same shape as the input representations
    std::size_t anchors_used = 0; // pair sets that actually contributed
};

/// Aggregate view used for logging; total = ts + alpha1*tssp + alpha2*cssl.
struct LossReport {
    double l_ts = 0.0;
    double l_tssp = 0.0;
    double l_cssl = 0.0;
    double l_total = 0.0;
};

/// Binary cross-entropy summed over boundary positions.
TsLoss loss_ts(const Vec& probs, const BoundaryLabels& labels);

/// 3-class cross-entropy over adjacent-pair probability rows. Each row must
/// lie on the simplex to within 1e-9.
TsspLoss loss_tssp(const std::vector<std::array<double, 3>>& rows, const std::vector<int>& labels);

/// Cosine similarity divided by the temperature. Zero vectors are an error.
double scaled_cosine(const Vec& x1, const Vec& x2, double tau);

/// Contrastive loss over all non-excluded pair sets: for each anchor,
/// -log of the positive exponential mass over the total mass. Summed over
/// anchors by default; mean_over_anchors divides value and gradient by the
/// number of contributing anchors.
CsslLoss loss_cssl(const std::vector<Vec>& reps, const std::vector<PairSet>& pairsets,
                   double tau, bool mean_over_anchors = false);

double loss_total(double l_ts, double l_tssp, double l_cssl, double alpha1, double alpha2);

/// Central-difference check of an analytic gradient. Returns the max over
/// coordinates of |analytic - numeric| / max(1, |numeric|).
double finite_diff_check(const std::function<double(const Vec&)>& value_fn, const Vec& x,
                         const Vec& analytic_grad, double epsilon);

}  // namespace topseg
