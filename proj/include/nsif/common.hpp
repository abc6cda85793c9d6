#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nsif {

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};
inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};
inline Vec3 operator*(double s, Vec3 v) { return v * s; }

struct Mat3 {
    double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    static Mat3 identity() {
        Mat3 m;
        m.a[0][0] = m.a[1][1] = m.a[2][2] = 1;
        return m;
    }
    Vec3 apply(Vec3 v) const {
        return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
                a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
                a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
    }
    Mat3 mul(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += a[i][k] * o.a[k][j];
                r.a[i][j] = s;
            }
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[j][i];
        return r;
    }
    double trace() const { return a[0][0] + a[1][1] + a[2][2]; }
    double max_abs_diff(const Mat3& o) const {
        double m = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - o.a[i][j]));
        return m;
    }
};

/// Axis-aligned rectangle [lo.x,hi.x] x [lo.y,hi.y].
struct Box2 {
    Vec2 lo, hi;
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double diameter() const { return std::hypot(width(), height()); }
    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    bool contains_strict(Vec2 p) const {
        return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
    }
    bool contains_box(const Box2& b, double rel_tol = 0) const {
        double tx = rel_tol * (std::abs(lo.x) + std::abs(hi.x) + 1e-300);
        double ty = rel_tol * (std::abs(lo.y) + std::abs(hi.y) + 1e-300);
        return b.lo.x >= lo.x - tx && b.hi.x <= hi.x + tx && b.lo.y >= lo.y - ty &&
               b.hi.y <= hi.y + ty;
    }
    bool disjoint(const Box2& b) const {
        return b.lo.x > hi.x || b.hi.x < lo.x || b.lo.y > hi.y || b.hi.y < lo.y;
    }
    Box2 dilated(double r) const { return {{lo.x - r, lo.y - r}, {hi.x + r, hi.y + r}}; }
    Box2 hull(const Box2& b) const {
        return {{std::min(lo.x, b.lo.x), std::min(lo.y, b.lo.y)},
                {std::max(hi.x, b.hi.x), std::max(hi.y, b.hi.y)}};
    }
    Vec2 center() const { return {(lo.x + hi.x) / 2, (lo.y + hi.y) / 2}; }
    // Signed distance convention: positive outside, negative inside.
    double dist_outside(Vec2 p) const {
        double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
        double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
        return std::hypot(dx, dy);
    }
    double dist_to_boundary_from_inside(Vec2 p) const {
        return std::min(std::min(p.x - lo.x, hi.x - p.x), std::min(p.y - lo.y, hi.y - p.y));
    }
};

struct Interval {
    double lo = 0, hi = 0;
    bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
    bool disjoint(const Interval& o) const { return o.lo > hi || o.hi < lo; }
    double length() const { return hi - lo; }
};

struct GridSpec {
    int nx = 64, ny = 64;
};

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / double(n - 1);
    return v;
}

/// Gauss-Legendre nodes/weights on [-1,1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
            }
            pp = n * (t * p0 - p1) / (t * t - 1);
            double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1 - t * t) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct GaussRule {
    std::vector<double> x, w;  // on [-1,1]
    explicit GaussRule(int n) { gauss_legendre(n, x, w); }
    template <class F>
    double integrate(double a, double b, F&& f) const {
        double mid = (a + b) / 2, half = (b - a) / 2, s = 0;
        for (size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + half * x[i]);
        return s * half;
    }
};

inline unsigned worker_count() {
    if (const char* env = std::getenv("NSI_FORGE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return unsigned(n);
    }
    unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

/// Deterministic parallel map-reduce over [0,n): chunks are combined in index order.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    unsigned workers = std::min<std::size_t>(worker_count(), n ? n : 1);
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        std::size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] {
            for (std::size_t i = b; i < e; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// FNV-1a over a string; used to stamp reports with the config they came from.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nsif
