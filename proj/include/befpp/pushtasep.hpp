#pragma once

#include <cassert>
#include <cstdint>
#include <queue>
#include <vector>

#include "befpp/errors.hpp"
#include "befpp/params.hpp"
#include "befpp/rng.hpp"

namespace befpp {

// Ordered particle positions on the integers (1-indexed particles, sites
// starting at 1). Each of the first `count` particles carries its own random
// stream, so truncating the system is exact and coupled extensions replay the
// shared prefix bit-identically.
struct ParticleConfig {
    std::vector<int64_t> pos; // strictly increasing

    int64_t particle(int64_t one_based) const {
        if (one_based < 1 || one_based > static_cast<int64_t>(pos.size()))
            throw config_error("ParticleConfig: particle index out of range");
        return pos[one_based - 1];
    }
    bool ordered() const {
        for (size_t i = 1; i < pos.size(); ++i)
            if (pos[i - 1] >= pos[i]) return false;
        return true;
    }
};

namespace sim_sub {
// init and dynamics use disjoint per-particle substreams: the initial gap of
// particle i must stay independent of its clock and jump draws
constexpr uint64_t particles_init = 3;
constexpr uint64_t particles_run = 4;
} // namespace sim_sub

// Occupy sites 1, 2, 3, ... i.i.d. with probability b/(a+b) and keep the
// first `count` particles; gaps (including the first position) are
// 1 + Geom(a/(a+b)), drawn by inverse transform from each particle's stream.
inline ParticleConfig init_particles(const ModelParams& p, int64_t count,
                                     const StreamKey& key) {
    p.validate();
    if (count < 1) throw domain_error("init_particles: count must be >= 1");
    const double q = p.geom_q();
    ParticleConfig cfg;
    cfg.pos.resize(count);
    int64_t prev = 0;
    for (int64_t i = 0; i < count; ++i) {
        RngStream s = key.entity_stream(sim_sub::particles_init, static_cast<uint64_t>(i));
        prev += 1 + static_cast<int64_t>(s.geometric(q));
        cfg.pos[i] = prev;
    }
    return cfg;
}

namespace detail {

struct ParticleClock {
    double time;
    int32_t idx;
    bool operator>(const ParticleClock& o) const {
        return time != o.time ? time > o.time : idx > o.idx;
    }
};

// Shared event loop. Each displacement (the ring jump and every push) is
// drawn from the stream of the particle that moves; the draw sequence seen by
// particle j then depends only on particles <= j, which is what makes
// truncation-coupling exact.
template <typename Pos, typename JumpFn>
void run_particle_events(std::vector<Pos>& pos, std::vector<RngStream>& streams,
                         double clock_rate, double t_end, JumpFn jump) {
    const int64_t count = static_cast<int64_t>(pos.size());
    std::priority_queue<ParticleClock, std::vector<ParticleClock>, std::greater<ParticleClock>>
        clocks;
    for (int64_t i = 0; i < count; ++i)
        clocks.push({streams[i].exponential(clock_rate), static_cast<int32_t>(i)});
    while (!clocks.empty() && clocks.top().time <= t_end) {
        const ParticleClock ev = clocks.top();
        clocks.pop();
        const int64_t i = ev.idx;
        pos[i] += jump(streams[i]);
        for (int64_t j = i + 1; j < count; ++j) {
            if (pos[j - 1] < pos[j]) break;
            pos[j] = pos[j - 1] + jump(streams[j]);
        }
        clocks.push({ev.time + streams[i].exponential(clock_rate), ev.idx});
    }
}

} // namespace detail

// Geometric jump pushTASEP: rate-a clocks; on particle i's ring it jumps by
// 1 + Geom(a/(a+b)); each overtaken particle j is pushed to p_{j-1} + 1 +
// Geom(a/(a+b)) in increasing j until order is restored. Pushes propagate
// rightward only, so the dynamics of the first `count` particles are
// autonomous.
inline void run_pushtasep(ParticleConfig& cfg, const ModelParams& p, double t_end,
                          const StreamKey& key) {
    p.validate();
    if (t_end < 0.0) throw domain_error("run_pushtasep: t_end must be >= 0");
    if (!cfg.ordered()) throw config_error("run_pushtasep: positions must be strictly increasing");
    const int64_t count = static_cast<int64_t>(cfg.pos.size());
    const double q = p.geom_q();
    std::vector<RngStream> streams;
    streams.reserve(count);
    for (int64_t i = 0; i < count; ++i)
        streams.push_back(key.entity_stream(sim_sub::particles_run, static_cast<uint64_t>(i)));
    detail::run_particle_events(cfg.pos, streams, p.a, t_end, [q](RngStream& s) {
        return 1 + static_cast<int64_t>(s.geometric(q));
    });
    assert(cfg.ordered());
}

// H_t(n) = p_t(n + offset) - (n + offset). With offset 1 (the default used by
// the toolkit) the t = 0 law matches the FPP height exactly: both sides are
// (n+1)-fold geometric convolutions.
inline int64_t height_from_particles(const ParticleConfig& cfg, int64_t n, int64_t offset) {
    const int64_t idx = n + offset;
    if (idx < 1 || idx > static_cast<int64_t>(cfg.pos.size()))
        throw config_error("height_from_particles: not enough particles simulated");
    return cfg.particle(idx) - idx;
}

// Unit-jump, unit-push pushTASEP with rate-1 clocks in rescaled time, started
// from the fully packed configuration. Direct implementation of the a -> 0
// degeneration, not a limit of the general engine.
inline ParticleConfig run_pushtasep_limit(int64_t count, double t_end, const StreamKey& key) {
    if (count < 1) throw domain_error("run_pushtasep_limit: count must be >= 1");
    if (t_end < 0.0) throw domain_error("run_pushtasep_limit: t_end must be >= 0");
    ParticleConfig cfg;
    cfg.pos.resize(count);
    for (int64_t i = 0; i < count; ++i) cfg.pos[i] = i + 1;
    std::vector<RngStream> streams;
    streams.reserve(count);
    for (int64_t i = 0; i < count; ++i)
        streams.push_back(key.entity_stream(sim_sub::particles_run, static_cast<uint64_t>(i)));
    detail::run_particle_events(cfg.pos, streams, 1.0, t_end,
                                [](RngStream&) { return int64_t{1}; });
    assert(cfg.ordered());
    return cfg;
}

// Continuous-space pushTASEP on the nonnegative reals: initial gaps, jumps
// and pushes are all Exp(lambda_rate); rate-1 clocks.
inline std::vector<double> run_continuous_pushtasep(double lambda_rate, int64_t count,
                                                    double t_end, const StreamKey& key) {
    if (!(lambda_rate > 0.0))
        throw domain_error("run_continuous_pushtasep: lambda_rate must be positive");
    if (count < 1) throw domain_error("run_continuous_pushtasep: count must be >= 1");
    std::vector<RngStream> streams;
    streams.reserve(count);
    for (int64_t i = 0; i < count; ++i)
        streams.push_back(key.entity_stream(sim_sub::particles_run, static_cast<uint64_t>(i)));
    std::vector<double> pos(count);
    double prev = 0.0;
    for (int64_t i = 0; i < count; ++i) {
        prev += streams[i].exponential(lambda_rate);
        pos[i] = prev;
    }
    detail::run_particle_events(pos, streams, 1.0, t_end, [lambda_rate](RngStream& s) {
        return s.exponential(lambda_rate);
    });
    return pos;
}

} // namespace befpp
