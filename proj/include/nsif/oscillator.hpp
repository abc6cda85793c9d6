#pragma once

#include <cmath>
#include <vector>

#include "nsif/common.hpp"
#include "nsif/profile1d.hpp"

namespace nsif {

/// Square-wave oscillatory process in [-1,1], T-periodic:
/// role 1: +1 on (0,T/4), -1 on (T/4,T/2), 0 on (T/2,T);
/// role 2: +1 on (0,T/2), -1 on (T/2,T).
/// Pair index m compresses by 4^{m-1}, frequency index k by k.
/// The smoothed variant replaces each jump by a ramp; the disagreement set
/// has measure at most 1/k.
struct OscProcess {
    int role = 1;
    int pair_index = 1;
    int freq = 1;
    double period = 1;
    bool smoothed = false;
    double ramp_halfwidth = 0;  // 0: automatic from the measure bound

    double compression() const { return freq * std::pow(4.0, pair_index - 1); }
    double piece() const { return period / (4 * compression()); }

    double auto_halfwidth() const {
        int jumps_per_period = role == 1 ? 3 : 2;
        double J = jumps_per_period * compression();
        return std::min(piece() / 4, 1.0 / (2 * freq * J) / 2);
    }
    double halfwidth() const {
        return ramp_halfwidth > 0 ? ramp_halfwidth : auto_halfwidth();
    }

    void validate() const {
        if (role != 1 && role != 2) throw ConfigError("OscProcess: role must be 1 or 2");
        if (smoothed && halfwidth() >= piece() / 2)
            throw ConfigError("OscProcess: smoothing ramps would overlap");
    }

    static double square(int role, double phase) {  // phase in [0,1)
        if (role == 1) return phase < 0.25 ? 1.0 : phase < 0.5 ? -1.0 : 0.0;
        return phase < 0.5 ? 1.0 : -1.0;
    }

    /// Jump phases and the values on each side, for one period.
    struct Jump {
        double phase;
        double left, right;
    };
    std::vector<Jump> jumps() const {
        if (role == 1) return {{0.0, 0, 1}, {0.25, 1, -1}, {0.5, -1, 0}};
        return {{0.0, -1, 1}, {0.5, 1, -1}};
    }

    double eval(double t) const {
        double cyc = t * compression() / period;
        double phase = cyc - std::floor(cyc);
        if (!smoothed) return square(role, phase);
        double h = halfwidth() * compression() / period;  // half width in phase
        for (const Jump& j : jumps()) {
            double d = phase - j.phase;
            d -= std::round(d);  // periodic distance
            if (std::abs(d) < h)
                return j.left + (j.right - j.left) * smoothstep((d + h) / (2 * h)).f;
        }
        return square(role, phase);
    }

    /// Boundaries of smooth integration pieces over [t0, t1]: all jump times,
    /// plus ramp edges in smoothed mode.
    std::vector<double> piece_edges(double t0, double t1) const {
        std::vector<double> edges{t0, t1};
        double q = piece();
        double h = smoothed ? halfwidth() : 0;
        long k0 = long(std::floor(t0 / q)) - 1, k1 = long(std::ceil(t1 / q)) + 1;
        for (long k = k0; k <= k1; ++k) {
            double tj = k * q;
            for (double e : {tj - h, tj, tj + h})
                if (e > t0 && e < t1) edges.push_back(e);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        return edges;
    }
};

/// Integral of b_i^{m,k}(s) f(s, b_l^{n,k}(s)) over [0,t]: exact subinterval
/// decomposition, Gauss rule on each piece where both processes are smooth.
/// f must be even in its second argument (f(s,-1) = f(s,1)).
template <class F>
double pick_integral(const OscProcess& pi, const OscProcess& pl, F&& f, double t) {
    for (double s : {0.1 * t, 0.37 * t, 0.77 * t}) {
        double a = f(s, -1.0), b = f(s, 1.0);
        if (std::abs(a - b) > 1e-9 * (1 + std::abs(a) + std::abs(b)))
            throw ConfigError("pick_integral: f is not even in its oscillator argument");
    }
    auto ei = pi.piece_edges(0, t), el = pl.piece_edges(0, t);
    std::vector<double> edges;
    edges.reserve(ei.size() + el.size());
    std::merge(ei.begin(), ei.end(), el.begin(), el.end(), std::back_inserter(edges));
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    static const GaussRule g5(5), g15(15);
    double acc = 0;
    for (size_t s = 0; s + 1 < edges.size(); ++s) {
        double a = edges[s], b = edges[s + 1];
        const GaussRule& g =
            (pi.smoothed || pl.smoothed) && (b - a) < pi.period ? g15 : g5;
        acc += g.integrate(a, b, [&](double x) { return pi.eval(x) * f(x, pl.eval(x)); });
    }
    return acc;
}

inline OscProcess smooth(OscProcess p, int k) {
    p.freq = k;
    p.smoothed = true;
    p.validate();
    return p;
}

}  // namespace nsif
