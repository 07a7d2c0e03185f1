#include "topseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topseg {

namespace {

double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TsLoss loss_ts(const Vec& probs, const BoundaryLabels& labels) {
    if (probs.size() != labels.size()) {
        throw std::invalid_argument("loss_ts: probs and labels length mismatch");
    }
    TsLoss out;
    out.grad_probs.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = clamp_prob(probs[i]);
        const double y = static_cast<double>(labels[i]);
        out.value -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        out.grad_probs[i] = -y / p + (1.0 - y) / (1.0 - p);
    }
    return out;
}

TsspLoss loss_tssp(const std::vector<std::array<double, 3>>& rows,
                   const std::vector<int>& labels) {
    if (rows.size() != labels.size()) {
        throw std::invalid_argument("loss_tssp: rows and labels length mismatch");
    }
    TsspLoss out;
    out.grad_rows.assign(rows.size(), {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const double sum = row[0] + row[1] + row[2];
        if (std::abs(sum - 1.0) > 1e-9 || row[0] < 0.0 || row[1] < 0.0 || row[2] < 0.0) {
            throw std::invalid_argument("loss_tssp: row " + std::to_string(i) +
                                        " is not on the probability simplex");
        }
        const int y = labels[i];
        if (y < 0 || y > 2) {
            throw std::invalid_argument("loss_tssp: label out of {0,1,2}");
        }
        const double p = std::max(row[static_cast<std::size_t>(y)], kProbClamp);
        out.value -= std::log(p);
        out.grad_rows[i][static_cast<std::size_t>(y)] = -1.0 / p;
    }
    return out;
}

double scaled_cosine(const Vec& x1, const Vec& x2, double tau) {
    if (x1.size() != x2.size()) {
        throw std::invalid_argument("scaled_cosine: dimension mismatch");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("scaled_cosine: tau must be > 0");
    const double n1 = norm(x1);
    const double n2 = norm(x2);
    if (n1 == 0.0 || n2 == 0.0) {
        throw std::invalid_argument("scaled_cosine: zero vector");
    }
    return dot(x1, x2) / (n1 * n2) / tau;
}

CsslLoss loss_cssl(const std::vector<Vec>& reps, const std::vector<PairSet>& pairsets,
                   double tau, bool mean_over_anchors) {
    CsslLoss out;
    out.grad_reps.assign(reps.size(), Vec(reps.empty() ? 0 : reps[0].size(), 0.0));

    // d sim(x, y) / d x, with sim the tau-scaled cosine.
    auto sim_grad_x = [tau](const Vec& x, const Vec& y, Vec& gx) {
        const double nx = norm(x), ny = norm(y);
        const double c = dot(x, y) / (nx * ny);
        const double inv = 1.0 / (tau * nx);
        for (std::size_t d = 0; d < x.size(); ++d) {
            gx[d] = inv * (y[d] / ny - c * x[d] / nx);
        }
    };

    Vec gtmp;
    for (const auto& ps : pairsets) {
        if (ps.excluded || ps.positives.empty()) continue;
        if (ps.anchor >= reps.size()) {
            throw std::invalid_argument("loss_cssl: pair set anchor out of range");
        }
        for (std::size_t j : ps.positives) {
            if (j >= reps.size()) throw std::invalid_argument("loss_cssl: positive index out of range");
        }
        for (std::size_t j : ps.negatives) {
            if (j >= reps.size()) throw std::invalid_argument("loss_cssl: negative index out of range");
        }

        const Vec& anchor = reps[ps.anchor];
        std::vector<double> pos_sims, neg_sims;
        pos_sims.reserve(ps.positives.size());
        neg_sims.reserve(ps.negatives.size());
        double max_sim = -1e300;
        for (std::size_t j : ps.positives) {
            pos_sims.push_back(scaled_cosine(anchor, reps[j], tau));
            max_sim = std::max(max_sim, pos_sims.back());
        }
        for (std::size_t j : ps.negatives) {
            neg_sims.push_back(scaled_cosine(anchor, reps[j], tau));
            max_sim = std::max(max_sim, neg_sims.back());
        }

        // log-sum-exp with the shared max keeps the ratio stable.
        double pos_mass = 0.0, neg_mass = 0.0;
        for (double s : pos_sims) pos_mass += std::exp(s - max_sim);
        for (double s : neg_sims) neg_mass += std::exp(s - max_sim);
        const double total = pos_mass + neg_mass;
        out.value += std::log(total) - std::log(pos_mass);
        ++out.anchors_used;

        gtmp.assign(anchor.size(), 0.0);
        auto accumulate = [&](std::size_t j, double dloss_dsim) {
            sim_grad_x(anchor, reps[j], gtmp);
            for (std::size_t d = 0; d < gtmp.size(); ++d) {
                out.grad_reps[ps.anchor][d] += dloss_dsim * gtmp[d];
            }
            sim_grad_x(reps[j], anchor, gtmp);
            for (std::size_t d = 0; d < gtmp.size(); ++d) {
                out.grad_reps[j][d] += dloss_dsim * gtmp[d];
            }
        };
        for (std::size_t k = 0; k < ps.positives.size(); ++k) {
            const double w = std::exp(pos_sims[k] - max_sim);
            accumulate(ps.positives[k], w / total - w / pos_mass);
        }
        for (std::size_t k = 0; k < ps.negatives.size(); ++k) {
            const double w = std::exp(neg_sims[k] - max_sim);
            accumulate(ps.negatives[k], w / total);
        }
    }

    if (mean_over_anchors && out.anchors_used > 0) {
        const double inv = 1.0 / static_cast<double>(out.anchors_used);
        out.value *= inv;
        for (auto& g : out.grad_reps) {
            for (double& x : g) x *= inv;
        }
    }
    return out;
}

double loss_total(double l_ts, double l_tssp, double l_cssl, double alpha1, double alpha2) {
    if (alpha1 < 0.0 || alpha2 < 0.0) {
        throw std::invalid_argument("loss weights must be >= 0");
    }
    return l_ts + alpha1 * l_tssp + alpha2 * l_cssl;
}

double finite_diff_check(const std::function<double(const Vec&)>& value_fn, const Vec& x,
                         const Vec& analytic_grad, double epsilon) {
    if (analytic_grad.size() != x.size()) {
        throw std::invalid_argument("finite_diff_check: gradient size mismatch");
    }
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
        throw std::invalid_argument("finite_diff_check: epsilon must be in [1e-7, 1e-3]");
    }
    Vec probe = x;
    double max_rel_err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + epsilon;
        const double fp = value_fn(probe);
        probe[i] = x[i] - epsilon;
        const double fm = value_fn(probe);
        probe[i] = x[i];
        const double numeric = (fp - fm) / (2.0 * epsilon);
        const double rel = std::abs(analytic_grad[i] - numeric) / std::max(1.0, std::abs(numeric));
        max_rel_err = std::max(max_rel_err, rel);
    }
    return max_rel_err;
}

}  // namespace topseg
