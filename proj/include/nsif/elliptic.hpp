#pragma once

#include <cmath>

#include "nsif/common.hpp"

namespace nsif {

/// Complete elliptic integrals K(m), E(m) in the parameter convention m = k^2,
/// by the arithmetic-geometric mean, with dK/dm and d2K/dm2.
struct EllipticKE {
    double K = 0, E = 0, dK = 0, d2K = 0, dE = 0;
};

inline EllipticKE elliptic_KE(double m) {
    EllipticKE r;
    if (m < 0 || m >= 1) throw NumericError("elliptic_KE: m must be in [0,1)");
    if (m < 1e-8) {
        // series about m = 0, enough terms for full precision at this range
        double m2 = m * m, m3 = m2 * m;
        r.K = M_PI_2 * (1 + m / 4 + 9 * m2 / 64 + 25 * m3 / 256);
        r.E = M_PI_2 * (1 - m / 4 - 3 * m2 / 64 - 5 * m3 / 256);
        r.dK = M_PI_2 * (1.0 / 4 + 9 * m / 32 + 75 * m2 / 256);
        r.dE = M_PI_2 * (-1.0 / 4 - 3 * m / 32 - 15 * m2 / 256);
        r.d2K = M_PI_2 * (9.0 / 32 + 75 * m / 128);
        return r;
    }
    double a = 1, b = std::sqrt(1 - m), c = std::sqrt(m);
    double csum = c * c / 2;  // sum 2^{n-1} c_n^2
    double pow2 = 1;
    for (int it = 0; it < 64; ++it) {
        double cn = (a - b) / 2;
        // stop at the rounding floor; past it the doubling factor would
        // amplify noise into the sum
        if (!(cn > 4e-16 * a) || cn >= c) break;
        c = cn;
        double an = (a + b) / 2;
        double bn = std::sqrt(a * b);
        a = an;
        b = bn;
        pow2 *= 2;
        csum += pow2 / 2 * c * c;
    }
    r.K = M_PI_2 / a;
    r.E = r.K * (1 - csum);
    double om = 1 - m;
    // E - (1-m)K = K (m - csum): no cancellation of nearly equal values
    double N = r.K * (m - csum);
    r.dK = N / (2 * m * om);
    r.dE = -r.K * csum / (2 * m);
    // d/dm (E - (1-m)K) = K/2 exactly
    r.d2K = (r.K / 2 - 2 * (1 - 2 * m) * r.dK) / (2 * m * om);
    return r;
}

}  // namespace nsif
