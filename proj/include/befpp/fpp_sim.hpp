#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "befpp/errors.hpp"
#include "befpp/params.hpp"
#include "befpp/rng.hpp"
#include "befpp/scaling.hpp"

namespace befpp {

// Heights H_t(n) for n = 0..N.
struct HeightProfile {
    std::vector<int64_t> heights;
    bool truncated = false;
};

struct ClusterVertex {
    int64_t x;
    int64_t y;
    double time;
};

// Substream ids under a simulation label.
namespace sim_sub {
constexpr uint64_t coins = 0;  // vertex coins zeta(i,j)
constexpr uint64_t clocks = 1; // delayed-edge exponentials
constexpr uint64_t dp = 2;     // dynamic-programming edge weights
} // namespace sim_sub

// Time-0 backbone: from (0,0) follow each vertex's coin (0 -> north,
// 1 -> east) until leaving column N; returns the path height per column.
// Consumes the same coin substream as grow_cluster, in the same order.
inline std::vector<int64_t> sample_backbone(const ModelParams& p, int64_t N,
                                            const StreamKey& key) {
    p.validate();
    if (N < 0) throw domain_error("sample_backbone: N must be >= 0");
    RngStream coins = key.substream(sim_sub::coins);
    const double beta = p.coin_prob();
    std::vector<int64_t> heights(N + 1, 0);
    int64_t x = 0, y = 0;
    while (x <= N) {
        if (coins.bernoulli(beta)) {
            heights[x] = y; // coin 1: free step east, leave column x
            ++x;
        } else {
            ++y; // coin 0: free step north
            heights[x] = y;
        }
    }
    return heights;
}

struct GrowOptions {
    bool collect_snapshot = false;
    uint64_t event_cap = 1000000000ull;
};

struct GrowResult {
    HeightProfile profile;
    std::vector<ClusterVertex> snapshot;
    uint64_t events = 0;
    uint64_t vertices = 0;
    uint64_t clocks_scheduled = 0;
};

namespace detail {

// Per-column membership bitmap with lazily sampled coins. A coin is drawn at
// most once per vertex and reused for every later query.
class ClusterColumns {
public:
    explicit ClusterColumns(int64_t N) : member_(N + 1), coin_(N + 1) {}

    bool contains(int64_t x, int64_t y) const {
        const auto& col = member_[x];
        return y < static_cast<int64_t>(col.size()) && col[y] != 0;
    }
    void insert(int64_t x, int64_t y) {
        auto& col = member_[x];
        if (y >= static_cast<int64_t>(col.size())) col.resize(y + 16, 0);
        col[y] = 1;
    }
    bool coin(int64_t x, int64_t y, RngStream& rng, double beta) {
        auto& col = coin_[x];
        if (y >= static_cast<int64_t>(col.size())) col.resize(y + 16, -1);
        if (col[y] < 0) col[y] = rng.bernoulli(beta) ? 1 : 0;
        return col[y] != 0;
    }

private:
    std::vector<std::vector<uint8_t>> member_;
    std::vector<std::vector<int8_t>> coin_;
};

struct EdgeClock {
    double time;
    uint64_t seq; // deterministic tie-break
    int64_t x;
    int64_t y;
    bool up;
    bool operator>(const EdgeClock& o) const {
        return time != o.time ? time > o.time : seq > o.seq;
    }
};

} // namespace detail

// Event-driven exact growth of the percolation cluster restricted to columns
// <= N, up to time t_end. Pops the earliest pending edge clock and extends a
// coin-following walk from the fired edge's head until it merges with the
// cluster or exits the window; restriction to columns <= N is exact for the
// returned heights because walks never move left.
inline GrowResult grow_cluster(const ModelParams& p, int64_t N, double t_end,
                               const StreamKey& key, const GrowOptions& opts = {}) {
    p.validate();
    if (N < 0) throw domain_error("grow_cluster: N must be >= 0");
    if (t_end < 0.0) throw domain_error("grow_cluster: t_end must be >= 0");

    RngStream coins = key.substream(sim_sub::coins);
    RngStream clocks = key.substream(sim_sub::clocks);
    const double beta = p.coin_prob();

    detail::ClusterColumns cols(N);
    std::priority_queue<detail::EdgeClock, std::vector<detail::EdgeClock>,
                        std::greater<detail::EdgeClock>>
        pending;
    GrowResult res;
    res.profile.heights.assign(N + 1, 0);
    uint64_t seq = 0;

    auto insert_chain = [&](int64_t x, int64_t y, double time) {
        while (x <= N && !cols.contains(x, y)) {
            cols.insert(x, y);
            ++res.vertices;
            if (y > res.profile.heights[x]) res.profile.heights[x] = y;
            if (opts.collect_snapshot) res.snapshot.push_back({x, y, time});
            const bool zeta = cols.coin(x, y, coins, beta);
            ++res.clocks_scheduled;
            if (zeta) {
                // free step east, upward clock with rate a
                pending.push({time + clocks.exponential(p.a), seq++, x, y, true});
                ++x;
            } else {
                // free step north, rightward clock with rate b; firing into
                // column N+1 is a no-op, so boundary clocks stay harmless
                pending.push({time + clocks.exponential(p.b), seq++, x, y, false});
                ++y;
            }
        }
    };

    insert_chain(0, 0, 0.0);
    uint64_t events = 0;
    while (!pending.empty() && pending.top().time <= t_end) {
        const detail::EdgeClock ev = pending.top();
        pending.pop();
        if (++events > opts.event_cap)
            throw resource_error("grow_cluster: event cap exceeded");
        const int64_t hx = ev.up ? ev.x : ev.x + 1;
        const int64_t hy = ev.up ? ev.y + 1 : ev.y;
        insert_chain(hx, hy, ev.time);
    }
    res.events = events;
    return res;
}

// Emits every cluster vertex with its insertion timestamp.
inline std::vector<ClusterVertex> cluster_snapshot(const ModelParams& p, int64_t N,
                                                   double t_end, const StreamKey& key) {
    GrowOptions opts;
    opts.collect_snapshot = true;
    return grow_cluster(p, N, t_end, key, opts).snapshot;
}

struct DpOptions {
    int64_t row_cap = -1; // default: 64 * M0
};

struct dp_resource_error : resource_error {
    HeightProfile partial;
    dp_resource_error(const std::string& msg, HeightProfile part)
        : resource_error(msg), partial(std::move(part)) {}
};

// Dynamic-programming sampler of the same height law: samples edge weights
// row by row and stops at the first row m* with T(n, m*) > t_end for every
// n <= N. Any path to a higher row passes through row m* with at least that
// partial passage time, so the stopping rule is exact despite T not being
// monotone in m.
inline HeightProfile dp_heights(const ModelParams& p, int64_t N, double t_end,
                                const StreamKey& key, const DpOptions& opts = {}) {
    p.validate();
    if (N < 0) throw domain_error("dp_heights: N must be >= 0");
    RngStream rng = key.substream(sim_sub::dp);
    const double beta = p.coin_prob();

    const ScalingConstants sc = scaling_constants(p);
    const double Nd = static_cast<double>(N);
    const int64_t M0 = static_cast<int64_t>(
        std::ceil((p.a / p.b) * Nd + sc.d * std::pow(Nd, 2.0 / 3.0) +
                  10.0 * sc.sigma * std::pow(Nd, 4.0 / 9.0) + 20.0));
    const int64_t row_cap = opts.row_cap > 0 ? opts.row_cap : 64 * M0;

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> T(N + 1), vprev(N + 1), vcur(N + 1), hcur(N + 1);
    HeightProfile prof;
    prof.heights.assign(N + 1, 0);

    auto sample_row = [&](std::vector<double>& v, std::vector<double>& h) {
        for (int64_t i = 0; i <= N; ++i) {
            if (rng.bernoulli(beta)) {
                v[i] = rng.exponential(p.a);
                h[i] = 0.0;
            } else {
                v[i] = 0.0;
                h[i] = rng.exponential(p.b);
            }
        }
    };

    // row 0
    sample_row(vprev, hcur);
    T[0] = 0.0;
    for (int64_t i = 1; i <= N; ++i) T[i] = T[i - 1] + hcur[i - 1];
    for (int64_t i = 0; i <= N; ++i)
        if (T[i] <= t_end) prof.heights[i] = 0;

    for (int64_t m = 1;; ++m) {
        if (m > row_cap) {
            prof.truncated = true;
            throw dp_resource_error("dp_heights: row cap exceeded", prof);
        }
        sample_row(vcur, hcur);
        double row_min = inf;
        double left = T[0] + vprev[0];
        T[0] = left;
        if (left <= t_end) prof.heights[0] = m;
        row_min = std::min(row_min, left);
        for (int64_t i = 1; i <= N; ++i) {
            const double via_left = T[i - 1] + hcur[i - 1];
            const double via_down = T[i] + vprev[i];
            const double v = std::min(via_left, via_down);
            T[i] = v;
            if (v <= t_end) prof.heights[i] = m;
            row_min = std::min(row_min, v);
        }
        vprev.swap(vcur);
        if (row_min > t_end) break;
    }
    return prof;
}

// Analytic law of column 0: P(H_t(0) >= m) as a Binomial-Gamma convolution.
// The passage time to (0, m) is a Bernoulli-thinned sum of Exp(a) variables.
inline double column0_law_ge(const ModelParams& p, int64_t m, double t) {
    if (m <= 0) return 1.0;
    const double beta = p.coin_prob(), q = 1.0 - beta;
    double sum = 0.0;
    for (int64_t k = 0; k <= m; ++k) {
        // log C(m,k) beta^k q^{m-k}
        const double lbin = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(m - k + 1.0) + k * std::log(beta) +
                            (m - k) * std::log(q);
        // P(Gamma(k, rate a) <= t) = 1 - e^{-at} sum_{j<k} (at)^j / j!
        double gcdf = 1.0;
        if (k > 0) {
            const double at = p.a * t;
            double term = std::exp(-at), tail = term;
            for (int64_t j = 1; j < k; ++j) {
                term *= at / j;
                tail += term;
            }
            gcdf = 1.0 - tail;
        }
        sum += std::exp(lbin) * gcdf;
    }
    return sum;
}

} // namespace befpp
