#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "nsif/common.hpp"

namespace nsif {

/// Iterated contraction system behind the self-similar singular set:
/// Gamma_n(x) = tau x + z + (n-1)(X,0,0); the x1 components
/// beta_n(x) = tau x + z1 + (n-1)X generate a Cantor set of dimension
/// -log M / log tau.
struct IFSParams {
    double tau = 1.0 / 3;
    long long M = 2;
    double z1 = 0, z2 = 0;
    double X = 1;

    void validate(double xi = -1) const {
        if (!(tau > 0 && tau < 1)) throw ConfigError("IFSParams: tau must be in (0,1)");
        if (M < 1) throw ConfigError("IFSParams: M must be a positive integer");
        if (tau * M >= 1) throw ConfigError("IFSParams: need tau M < 1");
        if (xi >= 0 && std::pow(tau, xi) * M < 1)
            throw ConfigError("IFSParams: tau^xi M >= 1 fails for the requested xi");
    }

    double beta(long long n, double x) const { return tau * x + z1 + double(n - 1) * X; }
    double gamma(double x) const { return tau * x + z2; }
    Vec3 Gamma(long long n, Vec3 p) const { return {beta(n, p.x), gamma(p.y), tau * p.z}; }

    double dimension() const { return -std::log(double(M)) / std::log(tau); }
};

/// Closed form of the composition beta_{m_1} o ... o beta_{m_j}.
inline double pi_m(const IFSParams& s, const std::vector<int>& m, double x) {
    double tj = std::pow(s.tau, double(m.size()));
    double val = tj * x + s.z1 * (1 - tj) / (1 - s.tau);
    double tk = 1;
    for (size_t k = 0; k < m.size(); ++k) {
        if (m[k] < 1 || m[k] > s.M) throw ConfigError("pi_m: index out of range");
        val += s.X * tk * (m[k] - 1);
        tk *= s.tau;
    }
    return val;
}

/// Same map evaluated by explicit composition (the oracle for the closed form).
inline double pi_m_composed(const IFSParams& s, const std::vector<int>& m, double x) {
    double val = x;
    for (size_t k = m.size(); k-- > 0;) val = s.beta(m[k], val);
    return val;
}

struct Box3 {
    Vec3 lo, hi;
    bool disjoint(const Box3& o) const {
        return o.lo.x > hi.x || o.hi.x < lo.x || o.lo.y > hi.y || o.hi.y < lo.y ||
               o.lo.z > hi.z || o.hi.z < lo.z;
    }
    bool contains(const Box3& o, double tol = 0) const {
        return o.lo.x >= lo.x - tol && o.hi.x <= hi.x + tol && o.lo.y >= lo.y - tol &&
               o.hi.y <= hi.y + tol && o.lo.z >= lo.z - tol && o.hi.z <= hi.z + tol;
    }
};

struct StageBoxes {
    int depth = 0;
    std::vector<Box3> boxes;         // one per multiindex, lexicographic order
    double min_separation = 0;       // between distinct boxes, x1 direction
    bool pairwise_disjoint = false;
    bool nested_in_previous = false;
};

/// Depth-j images of a seed box under all multiindex compositions, with
/// disjointness and nesting certified by interval arithmetic.
inline std::vector<StageBoxes> iterate_boxes(const IFSParams& s, Box3 seed, int depth,
                                             long guard = 100000) {
    s.validate();
    double count = std::pow(double(s.M), double(depth));
    if (count > double(guard))
        throw ConfigError("iterate_boxes: component count exceeds the guard");

    std::vector<StageBoxes> stages(depth + 1);
    stages[0].depth = 0;
    stages[0].boxes = {seed};
    stages[0].pairwise_disjoint = true;
    stages[0].nested_in_previous = true;
    // affine maps x -> tau^j x + off, one per multiindex; the child of the
    // multiindex m under n is m followed by n (composition on the right), so
    // nesting against the parent box is the genuine subdivision relation
    std::vector<Vec3> offs{{0, 0, 0}};
    double scale = 1;
    for (int j = 1; j <= depth; ++j) {
        auto& st = stages[j];
        st.depth = j;
        std::vector<Vec3> next_offs;
        next_offs.reserve(offs.size() * s.M);
        for (size_t parent = 0; parent < offs.size(); ++parent)
            for (long long n = 1; n <= s.M; ++n) {
                Vec3 o = offs[parent];
                Vec3 no{scale * (s.z1 + double(n - 1) * s.X) + o.x, scale * s.z2 + o.y, o.z};
                next_offs.push_back(no);
                double sc = scale * s.tau;
                st.boxes.push_back({{sc * seed.lo.x + no.x, sc * seed.lo.y + no.y,
                                     sc * seed.lo.z + no.z},
                                    {sc * seed.hi.x + no.x, sc * seed.hi.y + no.y,
                                     sc * seed.hi.z + no.z}});
            }
        offs = std::move(next_offs);
        scale *= s.tau;
        st.pairwise_disjoint = true;
        st.min_separation = std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < st.boxes.size(); ++a)
            for (size_t b = a + 1; b < st.boxes.size(); ++b) {
                if (!st.boxes[a].disjoint(st.boxes[b])) st.pairwise_disjoint = false;
                double gap = std::max(st.boxes[b].lo.x - st.boxes[a].hi.x,
                                      st.boxes[a].lo.x - st.boxes[b].hi.x);
                st.min_separation = std::min(st.min_separation, gap);
            }
        st.nested_in_previous = true;
        double ntol = 1e-12 * (std::abs(seed.hi.x) + std::abs(seed.lo.x) + s.X * depth);
        for (size_t i = 0; i < st.boxes.size(); ++i)
            if (!stages[j - 1].boxes[i / s.M].contains(st.boxes[i], ntol))
                st.nested_in_previous = false;
    }
    return stages;
}

/// x1-projection intervals of the depth-j iterate: exactly the images
/// pi_m(seed) in multiindex order.
inline std::vector<Interval> stage_intervals(const IFSParams& s, Interval seed, int depth) {
    std::vector<double> offs{0};
    double scale = 1;
    for (int j = 0; j < depth; ++j) {
        std::vector<double> next;
        next.reserve(offs.size() * s.M);
        for (double o : offs)
            for (long long n = 1; n <= s.M; ++n)
                next.push_back(scale * (s.z1 + double(n - 1) * s.X) + o);
        offs = std::move(next);
        scale *= s.tau;
    }
    std::vector<Interval> cur;
    cur.reserve(offs.size());
    for (double o : offs) cur.push_back({scale * seed.lo + o, scale * seed.hi + o});
    return cur;
}

struct DimensionFit {
    double dimension = 0;
    double closed_form = 0;
    std::vector<double> log_inv_delta, log_count;
    nlohmann::json to_json() const {
        return {{"dimension", dimension},
                {"closed_form", closed_form},
                {"log_inv_delta", log_inv_delta},
                {"log_count", log_count}};
    }
};

/// Box-counting estimate on the x1-projection of the depth-j iterate:
/// least-squares slope of log N(delta) over dyadic covers, fitted inside the
/// self-similar window.
inline DimensionFit box_counting_dimension(const IFSParams& s, Interval seed, int depth) {
    auto intervals = stage_intervals(s, seed, depth);
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double L = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& I : intervals) {
        lo = std::min(lo, I.lo);
        hi = std::max(hi, I.hi);
    }
    L = hi - lo;
    DimensionFit fit;
    fit.closed_form = s.dimension();
    // dyadic scales within the geometric window of the iterate
    double dmax = L * s.tau;
    double dmin = std::max(L * std::pow(s.tau, depth - 1), seed.length() * 1e-12);
    int lmin = int(std::ceil(std::log2(L / dmax)));
    int lmax = int(std::floor(std::log2(L / dmin)));
    for (int l = lmin; l <= lmax; ++l) {
        double delta = L / std::pow(2.0, l);
        // count occupied dyadic boxes by interval sweep
        long count = 0;
        long last = std::numeric_limits<long>::min();
        for (const auto& I : intervals) {
            long i0 = long(std::floor((I.lo - lo) / delta));
            long i1 = long(std::floor((I.hi - lo) / delta));
            i0 = std::max(i0, last + 1);
            if (i1 >= i0) {
                count += i1 - i0 + 1;
                last = i1;
            }
        }
        fit.log_inv_delta.push_back(std::log(1 / delta));
        fit.log_count.push_back(std::log(double(count)));
    }
    // least squares slope
    size_t n = fit.log_inv_delta.size();
    if (n < 2) throw NumericError("box_counting_dimension: depth too small for a fit");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += fit.log_inv_delta[i];
        sy += fit.log_count[i];
        sxx += fit.log_inv_delta[i] * fit.log_inv_delta[i];
        sxy += fit.log_inv_delta[i] * fit.log_count[i];
    }
    fit.dimension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

#include <functional>

/// Dyadic box count of the depth-j iterate without materializing it, using
/// the translate structure: per-cluster counts agree up to boundary effects,
/// so N(delta) = M * N_subcluster(delta) while clusters stay separated.
/// Valid for the huge component counts of planned self-similar arrangements.
inline DimensionFit box_counting_dimension_selfsimilar(const IFSParams& s, Interval seed,
                                                       int depth) {
    double L = seed.length();
    auto span = [&](int j) {  // extent of the depth-j iterate
        double tj = std::pow(s.tau, j);
        return double(s.M - 1) * s.X * (1 - tj) / (1 - s.tau) + tj * L;
    };
    std::function<double(double, int, double)> count = [&](double delta, int j,
                                                           double scale) -> double {
        if (j == 0) return std::floor(scale * L / delta) + 1;
        double cluster_gap = scale * s.X;  // spacing of the level-1 clusters
        if (delta >= cluster_gap) {
            // boxes blur whole clusters: the iterate is interval-like here
            return std::floor(scale * span(j) / delta) + 1;
        }
        return double(s.M) * count(delta, j - 1, scale * s.tau);
    };
    DimensionFit fit;
    fit.closed_form = s.dimension();
    double L0 = span(depth) / std::pow(s.tau, 0);  // full extent at stage depth
    (void)L0;
    double top = span(depth);
    for (int l = 1; l <= 40; ++l) {
        double delta = top * std::pow(0.5, l);
        if (delta > std::pow(s.tau, 1) * top) continue;       // pre-asymptotic
        if (delta < std::pow(s.tau, depth - 1) * top) break;  // below the window
        fit.log_inv_delta.push_back(std::log(1 / delta));
        fit.log_count.push_back(std::log(count(delta, depth, 1.0)));
    }
    // for strongly contracting systems dyadic levels may skip the window;
    // fall back to tau-adic scales inside it
    if (fit.log_inv_delta.size() < 2) {
        for (int j = 1; j < depth; ++j) {
            double delta = top * std::pow(s.tau, j) * 0.7;
            fit.log_inv_delta.push_back(std::log(1 / delta));
            fit.log_count.push_back(std::log(count(delta, depth, 1.0)));
        }
    }
    size_t n = fit.log_inv_delta.size();
    if (n < 2) throw NumericError("box_counting_dimension_selfsimilar: empty fit window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += fit.log_inv_delta[i];
        sy += fit.log_count[i];
        sxx += fit.log_inv_delta[i] * fit.log_inv_delta[i];
        sxy += fit.log_inv_delta[i] * fit.log_count[i];
    }
    fit.dimension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

}  // namespace nsif
