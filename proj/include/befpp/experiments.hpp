#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "befpp/errors.hpp"
#include "befpp/exact_law.hpp"
#include "befpp/fpp_sim.hpp"
#include "befpp/pushtasep.hpp"
#include "befpp/stats.hpp"
#include "befpp/tracy_widom.hpp"

namespace befpp {

enum class SimMethod { event, dp, pushtasep };

inline SimMethod parse_method(const std::string& s) {
    if (s == "event") return SimMethod::event;
    if (s == "dp") return SimMethod::dp;
    if (s == "pushtasep") return SimMethod::pushtasep;
    throw config_error("unknown simulation method: " + s);
}

struct ExperimentConfig {
    ModelParams params;
    std::vector<int64_t> n_list;
    int64_t reps = 10000;
    uint64_t seed = 1;
    SimMethod method = SimMethod::pushtasep;
    int64_t offset = 1;
    int threads = 1;
    std::string out;
};

// Stream label for (experiment kind, n); mixed so distinct kinds never share
// entity substreams.
inline uint64_t sim_label(uint64_t kind, uint64_t n) {
    return detail::splitmix64((kind << 32) ^ n);
}

namespace sim_kind {
constexpr uint64_t fpp_event = 1;
constexpr uint64_t fpp_dp = 2;
constexpr uint64_t push_geom = 3;
constexpr uint64_t push_limit = 4;
constexpr uint64_t push_continuous = 5;
constexpr uint64_t snapshot = 6;
} // namespace sim_kind

// Deterministic replica-parallel fan-out: results land in replica order no
// matter how replicas are dealt to threads.
template <typename T, typename Fn>
std::vector<T> run_replicas(int64_t reps, int threads, Fn&& fn) {
    std::vector<T> out(reps);
    if (reps == 0) return out;
    threads = std::max(1, threads);
    if (threads == 1) {
        for (int64_t r = 0; r < reps; ++r) out[r] = fn(r);
        return out;
    }
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int64_t r = next.fetch_add(1);
                if (r >= reps) return;
                try {
                    out[r] = fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

// One replica of H_t(n) by the selected sampler.
inline int64_t simulate_height_once(const ModelParams& p, int64_t n, SimMethod method,
                                    int64_t offset, uint64_t seed, uint64_t replica) {
    switch (method) {
        case SimMethod::event: {
            StreamKey key{seed, replica, sim_label(sim_kind::fpp_event, n)};
            return grow_cluster(p, n, p.t, key).profile.heights[n];
        }
        case SimMethod::dp: {
            StreamKey key{seed, replica, sim_label(sim_kind::fpp_dp, n)};
            return dp_heights(p, n, p.t, key).heights[n];
        }
        case SimMethod::pushtasep: {
            StreamKey key{seed, replica, sim_label(sim_kind::push_geom, n)};
            ParticleConfig cfg = init_particles(p, n + offset, key);
            run_pushtasep(cfg, p, p.t, key);
            return height_from_particles(cfg, n, offset);
        }
    }
    throw config_error("simulate_height_once: bad method");
}

inline std::vector<int64_t> simulate_heights(const ModelParams& p, int64_t n, int64_t reps,
                                             SimMethod method, int64_t offset, uint64_t seed,
                                             int threads) {
    return run_replicas<int64_t>(reps, threads, [&](int64_t r) {
        return simulate_height_once(p, n, method, offset, seed, static_cast<uint64_t>(r));
    });
}

// ---- CSV helpers -----------------------------------------------------------

// Doubles are printed with round-trip precision so identical runs yield
// byte-identical files.
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open output file: " + path);
    for (const auto& l : lines) os << l << "\n";
}

// ---- Suites ----------------------------------------------------------------

struct TwStudyRow {
    int64_t n;
    int64_t reps;
    double ks_to_fgue;
    double mean_chi;
    double sd_chi;
};

// Rescaled-height KS distance to F_GUE for each n in the config.
inline std::vector<TwStudyRow> tw_convergence_study(const ExperimentConfig& cfg,
                                                    const FGueTable& table) {
    cfg.params.validate();
    std::vector<TwStudyRow> rows;
    for (int64_t n : cfg.n_list) {
        if (cfg.reps == 0) continue;
        const std::vector<int64_t> hs =
            simulate_heights(cfg.params, n, cfg.reps, cfg.method, cfg.offset, cfg.seed, cfg.threads);
        std::vector<double> chi(hs.size());
        for (size_t i = 0; i < hs.size(); ++i) chi[i] = chi_from_height(cfg.params, n, hs[i]);
        EmpiricalDistribution emp(chi);
        const double ks = ks_one_sample(emp, [&table](double x) { return table(x); });
        rows.push_back({n, cfg.reps, ks, emp.mean(), emp.sd()});
    }
    return rows;
}

struct EquivalenceRow {
    std::string pair;
    int64_t n;
    double ks;
    double critical;
    bool pass;
};

// Pairwise two-sample KS between the three same-law samplers at 1% level.
inline std::vector<EquivalenceRow> law_equivalence_suite(const ExperimentConfig& cfg,
                                                         double alpha = 0.01) {
    cfg.params.validate();
    std::vector<EquivalenceRow> rows;
    for (int64_t n : cfg.n_list) {
        auto to_double = [](const std::vector<int64_t>& v) {
            return std::vector<double>(v.begin(), v.end());
        };
        const EmpiricalDistribution ev(to_double(simulate_heights(
            cfg.params, n, cfg.reps, SimMethod::event, cfg.offset, cfg.seed, cfg.threads)));
        const EmpiricalDistribution dp(to_double(simulate_heights(
            cfg.params, n, cfg.reps, SimMethod::dp, cfg.offset, cfg.seed, cfg.threads)));
        const EmpiricalDistribution pt(to_double(simulate_heights(
            cfg.params, n, cfg.reps, SimMethod::pushtasep, cfg.offset, cfg.seed, cfg.threads)));
        const double crit = ks_two_sample_critical(cfg.reps, cfg.reps, alpha);
        const double d_ed = ks_two_sample(ev, dp);
        const double d_ep = ks_two_sample(ev, pt);
        const double d_dp = ks_two_sample(dp, pt);
        rows.push_back({"event-dp", n, d_ed, crit, d_ed < crit});
        rows.push_back({"event-pushtasep", n, d_ep, crit, d_ep < crit});
        rows.push_back({"dp-pushtasep", n, d_dp, crit, d_dp < crit});
    }
    return rows;
}

struct ExactMcRow {
    int64_t n;
    int64_t m;
    double p_exact;
    double p_mc;
    double se_mc;
    double z_score;
};

// det-formula probabilities against Monte Carlo with binomial standard
// errors; m sweeps the central region of the empirical law.
inline std::vector<ExactMcRow> exact_vs_mc_suite(const ExperimentConfig& cfg,
                                                 double lo_quantile = 0.05,
                                                 double hi_quantile = 0.95) {
    cfg.params.validate();
    std::vector<ExactMcRow> rows;
    for (int64_t n : cfg.n_list) {
        const std::vector<int64_t> hs = simulate_heights(cfg.params, n, cfg.reps, cfg.method,
                                                         cfg.offset, cfg.seed, cfg.threads);
        std::vector<int64_t> sorted(hs);
        std::sort(sorted.begin(), sorted.end());
        const int64_t lo = sorted[static_cast<size_t>(lo_quantile * (sorted.size() - 1))];
        const int64_t hi = sorted[static_cast<size_t>(hi_quantile * (sorted.size() - 1))];
        const double reps = static_cast<double>(hs.size());
        // the m = 1 boundary row (P(H = 0)) is always reported
        for (int64_t m = 1; m <= hi + 1; ++m) {
            if (m != 1 && m < lo) continue;
            int64_t below = 0;
            for (int64_t h : hs) below += h < m ? 1 : 0;
            const double p_mc = static_cast<double>(below) / reps;
            ExactLawRequest req;
            req.params = cfg.params;
            req.n = n;
            req.m = m;
            req.preset = ContourPreset::saddle;
            const double p_exact = prob_height_below(req).p;
            const double se = std::sqrt(std::max(p_mc * (1.0 - p_mc), 1.0 / reps) / reps);
            rows.push_back({n, m, p_exact, p_mc, se, (p_exact - p_mc) / se});
        }
    }
    return rows;
}

} // namespace befpp
