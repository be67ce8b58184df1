#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace entropy::analysis {

// Absorbing-chain model of one chunk group: state b = 0..n-k counts Byzantine
// members (transient), one extra state absorbs every history where fewer than
// k honest members remain. Per step: (1) honest churn C ~ Poisson(lambda *
// honest), (2) eviction of `evict` members uniformly, (3) hypergeometric
// refill from the non-member population back to size n.
struct CtmcParams {
    int64_t total_nodes = 0;   // N
    int64_t byzantine = 0;     // F
    int64_t group_size = 0;    // n
    int64_t threshold = 0;     // k
    double churn = 0.0;        // lambda, per honest member per step
    int64_t evict = 0;         // Upsilon, members evicted per step
    int64_t horizon = 0;       // t, steps

    int64_t states() const { return group_size - threshold + 2; }

    void validate() const {
        if (total_nodes < 1) throw std::invalid_argument("N must be >= 1");
        if (byzantine < 0 || byzantine > total_nodes) throw std::invalid_argument("F out of range");
        if (threshold < 1 || group_size < threshold || group_size > total_nodes)
            throw std::invalid_argument("need 1 <= k <= n <= N");
        if (churn < 0) throw std::invalid_argument("churn must be >= 0");
        if (evict < 0 || evict > group_size) throw std::invalid_argument("evict out of range");
        if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    }
};

using StateVector = std::vector<double>;

struct TransitionMatrix {
    int64_t dim = 0;
    std::vector<double> m;  // row-major

    double at(int64_t r, int64_t c) const { return m[size_t(r * dim + c)]; }
    double& at(int64_t r, int64_t c) { return m[size_t(r * dim + c)]; }
};

namespace detail {

inline double log_binom(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// P(X = x) for X ~ Hypergeom(population, successes, draws).
inline double hypergeom_pmf(int64_t x, int64_t population, int64_t successes, int64_t draws) {
    if (x < 0 || x > draws || x > successes || draws - x > population - successes) return 0.0;
    double l = log_binom(double(successes), double(x)) +
               log_binom(double(population - successes), double(draws - x)) -
               log_binom(double(population), double(draws));
    return std::exp(l);
}

inline double poisson_pmf(int64_t c, double mean) {
    if (c < 0) return 0.0;
    if (mean <= 0) return c == 0 ? 1.0 : 0.0;
    return std::exp(double(c) * std::log(mean) - mean - std::lgamma(double(c) + 1));
}

}  // namespace detail

// Eq. (5): hypergeometric over the Byzantine count of a freshly selected
// group; the tail mass b > n-k starts in the absorbing state.
inline StateVector initial_vector(const CtmcParams& p) {
    p.validate();
    StateVector v(size_t(p.states()), 0.0);
    double sum = 0;
    for (int64_t b = 0; b <= p.group_size - p.threshold; ++b) {
        double pr = detail::hypergeom_pmf(b, p.total_nodes, p.byzantine, p.group_size);
        v[size_t(b)] = pr;
        sum += pr;
    }
    v.back() = std::max(0.0, 1.0 - sum);
    return v;
}

// Exact tail P(b > n-k) of the group-selection hypergeometric, Eq. (1).
inline double hypergeom_tail(const CtmcParams& p) {
    p.validate();
    double sum = 0;
    for (int64_t b = 0; b <= p.group_size - p.threshold; ++b)
        sum += detail::hypergeom_pmf(b, p.total_nodes, p.byzantine, p.group_size);
    return std::max(0.0, 1.0 - sum);
}

// Eq. (3): exp(-2 (2n/3 - k)^2 / n), the Hoeffding bound on the same tail
// for F = N/3.
inline double hoeffding_bound(int64_t n, int64_t k) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (double(k) > 2.0 * double(n) / 3.0)
        throw std::invalid_argument("bound needs k <= 2n/3");
    double gap = 2.0 * double(n) / 3.0 - double(k);
    return std::exp(-2.0 * gap * gap / double(n));
}

// Exact enumeration of the generative step over (churn, evicted-honest,
// refilled-byzantine). Transient rows complete into the absorbing column.
inline TransitionMatrix transition_matrix(const CtmcParams& p) {
    p.validate();
    const int64_t n = p.group_size, k = p.threshold, N = p.total_nodes, F = p.byzantine;
    TransitionMatrix theta{p.states(), std::vector<double>(size_t(p.states() * p.states()), 0.0)};

    for (int64_t i = 0; i <= n - k; ++i) {
        const int64_t honest = n - i;
        for (int64_t c = 0; c <= honest - k; ++c) {
            double pc = detail::poisson_pmf(c, p.churn * double(honest));
            if (pc == 0.0) continue;
            const int64_t members = n - c;
            const int64_t ev = std::min(p.evict, members);
            for (int64_t vh = std::max<int64_t>(0, ev - i); vh <= std::min(ev, honest - c); ++vh) {
                double pv = detail::hypergeom_pmf(vh, members, honest - c, ev);
                if (pv == 0.0) continue;
                const int64_t h2 = honest - c - vh;
                const int64_t b2 = i - (ev - vh);
                if (h2 < k) continue;  // honest dipped below k: absorbing, by row completion
                const int64_t refill = c + ev;
                const int64_t outside = N - (h2 + b2);
                const int64_t outside_byz = F - b2;
                for (int64_t a = 0; a <= std::min<int64_t>(refill, outside_byz); ++a) {
                    double pa = detail::hypergeom_pmf(a, outside, outside_byz, refill);
                    if (pa == 0.0) continue;
                    theta.at(i, b2 + a) += pc * pv * pa;
                }
            }
        }
        double row = 0;
        for (int64_t j = 0; j <= n - k; ++j) row += theta.at(i, j);
        theta.at(i, n - k + 1) = std::max(0.0, 1.0 - row);
    }
    theta.at(n - k + 1, n - k + 1) = 1.0;  // absorbing state is sticky
    return theta;
}

inline StateVector apply_step(const StateVector& v, const TransitionMatrix& theta) {
    StateVector out(v.size(), 0.0);
    for (size_t r = 0; r < v.size(); ++r) {
        if (v[r] == 0.0) continue;
        for (size_t c = 0; c < v.size(); ++c) out[c] += v[r] * theta.at(int64_t(r), int64_t(c));
    }
    return out;
}

// Probability the group has been absorbed by step t. The absorbing state is
// sticky, so (I Theta^t) already accumulates; `paper_sum` exposes the paper's
// summed form for reconciliation.
inline double absorption_probability(const StateVector& initial, const TransitionMatrix& theta,
                                     int64_t t, bool paper_sum = false) {
    if (initial.size() != size_t(theta.dim)) throw std::invalid_argument("dimension mismatch");
    StateVector v = initial;
    double acc = 0;
    for (int64_t step = 0; step < t; ++step) {
        v = apply_step(v, theta);
        acc += v.back();
    }
    return paper_sum ? acc : v.back();
}

// Lemma 2: 1 - (1 - p)^(K+R), evaluated stably for tiny p.
inline double object_durability_bound(double p_group, int64_t K, int64_t R) {
    if (p_group < 0 || p_group > 1) throw std::invalid_argument("p must be in [0,1]");
    if (K + R < 1) throw std::invalid_argument("K+R must be >= 1");
    if (p_group >= 1.0) return 1.0;
    return -std::expm1(double(K + R) * std::log1p(-p_group));
}

struct AttackParams {
    double objects = 0;   // Omega
    int64_t K = 8;
    int64_t R = 2;
    double phi = 0;       // attacker node budget
    double mu = 1;        // fragments per node
    int64_t group_n = 80;
    int64_t group_k = 32;
    double phi_mu_override = 0;  // direct Phi*mu, used when > 0

    // Phi = floor(phi / (n/3 - k + 1)), the paper's budget conversion.
    double phi_mu() const {
        if (phi_mu_override > 0) return phi_mu_override;
        double per_group = double(group_n) / 3.0 - double(group_k) + 1.0;
        if (per_group <= 0)
            throw std::invalid_argument("budget conversion needs n/3 - k + 1 > 0; pass phi-mu directly");
        return std::floor(phi / per_group) * mu;
    }
};

// Lemma 3 / Eq. (16): 1 - (1 - prod_{i=1..R} (K+R-i)/(Omega(K+R)-i))^C(Phi*mu, R+1),
// in log space so astronomically large exponents survive.
inline double targeted_attack_bound(const AttackParams& ap) {
    if (ap.objects < 1 || ap.K < 1 || ap.R < 1) throw std::invalid_argument("bad attack params");
    double pm = ap.phi_mu();
    if (pm < double(ap.R + 1)) return 0.0;

    double log_q = 0;
    for (int64_t i = 1; i <= ap.R; ++i) {
        double num = double(ap.K + ap.R - i);
        double den = ap.objects * double(ap.K + ap.R) - double(i);
        if (num <= 0 || den <= 0) return 0.0;
        log_q += std::log(num) - std::log(den);
    }
    double q = std::exp(log_q);
    if (q >= 1.0) return 1.0;

    double log_binom =
        std::lgamma(pm + 1) - std::lgamma(double(ap.R + 2)) - std::lgamma(pm - double(ap.R));
    double neg_l1p = -std::log1p(-q);  // > 0
    double big = log_binom + std::log(neg_l1p);
    if (big > 40.0) return 1.0;                 // exponent so large the bound saturates
    double x = std::exp(big);                   // C(pm, R+1) * -log1p(-q)
    double out = -std::expm1(-x);
    return std::min(1.0, std::max(0.0, out));
}

struct McResult {
    double estimate = 0;
    double stderr_est = 0;
    uint64_t trials = 0;
};

// Direct simulation of the generative step; the validation oracle for the
// analytic chain.
inline McResult mc_absorption(const CtmcParams& p, uint64_t trials, uint64_t seed) {
    p.validate();
    std::mt19937_64 rng(seed);
    const int64_t n = p.group_size, k = p.threshold, N = p.total_nodes, F = p.byzantine;

    auto hyper_draw = [&](int64_t population, int64_t successes, int64_t draws) {
        int64_t got = 0;
        for (int64_t d = 0; d < draws; ++d) {
            std::uniform_int_distribution<int64_t> pick(1, population);
            if (pick(rng) <= successes) {
                ++got;
                --successes;
            }
            --population;
        }
        return got;
    };

    uint64_t absorbed = 0;
    for (uint64_t trial = 0; trial < trials; ++trial) {
        // initial group draw
        int64_t b = hyper_draw(N, F, n);
        bool dead = (n - b) < k;
        for (int64_t step = 0; step < p.horizon && !dead; ++step) {
            int64_t honest = n - b;
            std::poisson_distribution<int64_t> pois(p.churn * double(honest));
            int64_t c = std::min(pois(rng), honest);
            if (honest - c < k) {
                dead = true;
                break;
            }
            int64_t members = n - c;
            int64_t ev = std::min(p.evict, members);
            int64_t vh = hyper_draw(members, honest - c, ev);
            int64_t h2 = honest - c - vh;
            int64_t b2 = b - (ev - vh);
            if (h2 < k) {
                dead = true;
                break;
            }
            int64_t refill = c + ev;
            int64_t a = hyper_draw(N - (h2 + b2), F - b2, refill);
            b = b2 + a;
        }
        if (dead) ++absorbed;
    }
    double est = double(absorbed) / double(trials);
    double se = std::sqrt(std::max(est * (1 - est), 1e-12) / double(trials));
    return McResult{est, se, trials};
}

}  // namespace entropy::analysis
