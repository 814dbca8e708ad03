#ifndef CLEANKIT_SWEEP_HPP
#define CLEANKIT_SWEEP_HPP

#include <functional>

#include "cleankit/cloud.hpp"

namespace cleankit {

/// A cleaning schedule supported in lambda.  Either an explicit profile
/// block (cycled when shorter than the run) or a compact single-site form:
/// a site sequence swept at a fixed scale.  The compact form keeps
/// million-step gallery sweeps cheap.
struct Schedule {
    SiteSet lambda;
    std::vector<Profile> profiles;
    std::vector<site_index> sites;
    double site_eps = 1.0;

    static Schedule of_profiles(SiteSet lambda, std::vector<Profile> steps);
    static Schedule of_sites(SiteSet lambda, std::vector<site_index> order, double eps = 1.0);

    bool site_form() const { return !sites.empty(); }
    std::size_t size() const { return site_form() ? sites.size() : profiles.size(); }
};

/// Full-strength single-site sweeps cycling through lambda.
Schedule round_robin_schedule(const SiteSet& lambda, double eps = 1.0);

/// Sites with epsilon scales, as produced by the planner.
struct ScaledSchedule {
    std::vector<site_index> sites;
    std::vector<double> scales;    // each in (0,1]
    SiteSet lambda;
    std::vector<long> stage_ends;  // steps closing each planner level

    Schedule to_schedule(std::shared_ptr<const SiteSpace> space) const;
};

struct TraceRow {
    long n = 0;
    double dirt_in_lambda = 0.0;  // ||c B_1..B_n I_Lambda||_w
    double deviation = -1.0;      // ||c (B_1..B_n - Pi_Lambda)||_w, -1 when unavailable
    double coverage_min = 0.0;    // min over lambda of sum_i h_i
    double coverage_max = 0.0;
    double probe_mass = -1.0;     // ||c .. I_probe||_w when a probe set is given
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
    DirtVector final_dirt;
    std::uint64_t seed = 0;  // recorded in CSV header
};

struct RunOptions {
    long n_steps = 0;
    long trace_every = 1;          // record every k-th step (and the last)
    const BalayageResult* balayage = nullptr;
    std::uint64_t seed = 0;
    std::vector<site_index> probe;     // extra mass readout per trace row
    std::vector<long> record_at;       // additional steps to record (sorted)
};

/// rho_Lambda(l) = ||(I_L alpha I_L)^l||_{w->w} for l = 0..max_ell, or the
/// vector form ||c (I_L alpha I_L)^l||_w when c is given.
std::vector<double> contraction_profile(const Kernel& alpha, const SiteSet& lambda,
                                        const WeightVector& w, const DirtVector* c, int max_ell);

/// Applies the schedule to c step by step, recording the trace.
ConvergenceTrace run_schedule(const DirtVector& c, const Schedule& schedule, const Kernel& alpha,
                              const WeightVector& w, const RunOptions& opts);

/// The arbitrarily-slow-cleaning construction for alpha = 0: picks per-site
/// rates h so that eps_N = sum_i c_i (1-h_i)^N dominates delta_N on
/// [guarantee_from, guarantee_until].  (With infinitely many sites the upper
/// end would be absent; a finite support caps it at the probe horizon.)
struct SlowSchedule {
    Profile rates;
    long guarantee_from = 0;          // N_1
    long guarantee_until = 0;         // horizon used as the final N_{K+1}
    std::vector<long> settle_indices; // N_1 < ... < N_K < horizon
};
SlowSchedule slow_schedule(const DirtVector& c, const std::function<double(long)>& delta,
                           long probe_horizon);

/// The single-marker-update imitation: the epsilon in [0,1] with
/// c T_{nu'} = c T_nu beta_{eps delta_y}, where nu' moves kappa of nu's mass
/// at eta to eta's children and y = last(eta).
double imitation_epsilon(const DirtVector& c, const Cloud& nu, const Marker& eta, double kappa,
                         const Kernel& alpha);

struct PlanOptions {
    int probe_powers = 64;          // decay probe horizon
    double decay_factor = 1e-3;     // last probed value must be <= factor * max
    double dirt_target = 1e-9;      // plan until c (I_L a I_L)^k w drops below
    int max_stages = 4096;
};

/// Single-marker-update cleaning plan: sweeps the active marker mass level
/// by level, emitting one (site, epsilon) pair per visited site and level;
/// each emitted sweep equals the composite of the per-marker imitation
/// updates of that batch.  Throws nonconvergence_error when the decay probe
/// fails (the converse regime).
ScaledSchedule plan_cleaning(const DirtVector& c, const WeightVector& w, const Kernel& alpha,
                             const SiteSet& lambda, const PlanOptions& opts = {});

/// Writes the trace in the plotting CSV layout (one comment header line
/// carrying the seed, then n, dirt_in_lambda, deviation, coverage_min,
/// coverage_max).
std::string trace_to_csv(const ConvergenceTrace& trace);

}  // namespace cleankit

#endif
