#ifndef CLEANKIT_BATTERY_HPP
#define CLEANKIT_BATTERY_HPP

#include "cleankit/cloud.hpp"

namespace cleankit {

/// Outcome of one truncated-series evaluation sum_k c (I_L B I_L)^k w.
struct SeriesVerdict {
    bool finite = false;     // terms decayed before the horizon, no overflow
    bool overflow = false;   // a term crossed the overflow threshold
    double value = 0.0;      // partial sum at stop
    int terms = 0;
    double spr = -1.0;       // spr(I_L B I_L) when cheap to compute (small spaces)
};

struct BatteryCondition {
    std::string name;        // a, b, b_prime, c, c_prime, d, d_prime
    bool holds = false;
    std::vector<SeriesVerdict> evidence;  // one per sampled operator
};

struct BatteryReport {
    std::vector<BatteryCondition> conditions;
    double hypothesis_C = 0.0;    // sup_{x in L} (I_L a I_L w)_x / w_x
    bool hypothesis_bounded = false;  // C finite (always true on finite spaces)
    bool all_equivalent_agree = false;
};

struct BatteryOptions {
    int horizon = 2048;             // series terms probed
    double overflow_factor = 1e4;   // term_k > factor * max(1, term_0) => overflow
    double decay_factor = 1e-14;    // term_k <= factor * max(1, term_0) => converged
    int samples = 6;                // sampled h / f-sequences / clouds per condition
    std::uint64_t seed = 1;
    bool compute_spr = true;        // per-operator spectral radii (small spaces only)
};

SeriesVerdict series_verdict(const Kernel& b, const SiteSet& lambda, const DirtVector& c,
                             const WeightVector& w, const BatteryOptions& opts,
                             bool with_spr = false);

/// Evaluates the seven converse conditions on one instance by truncated
/// series with overflow sentinels, sampling the quantified operators.
BatteryReport converse_battery(const Kernel& alpha, const SiteSet& lambda, const DirtVector& c,
                               const WeightVector& w, const BatteryOptions& opts = {});

}  // namespace cleankit

#endif
