#pragma once

#include <cmath>

#include <dnlw/errors.hpp>

namespace dnlw {

/// Diffusion exponents of the operator \f$\Delta_p(u^m)\f$ together with the
/// derived homogeneity constant gamma = m(p-1)-1.  Only the slow (gamma > 0)
/// and pseudo-linear (gamma = 0) ranges are accepted.
struct Params {
    double m;
    double p;
    double gamma;  // always m*(p-1)-1, never stored independently

    bool pseudo_linear() const { return gamma == 0.0; }
};

inline Params make_params(double m, double p) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw DomainError("make_params: m must be positive and finite");
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw DomainError("make_params: p must be > 1 and finite");
    }
    double gamma = m * (p - 1.0) - 1.0;
    // the pseudo-linear line is hit only up to rounding in m and p; snap
    // values at noise level to exactly zero instead of misclassifying them
    if (std::fabs(gamma) < 1e-12) gamma = 0.0;
    if (gamma < 0.0) {
        throw DomainError("make_params: fast-diffusion range m(p-1) < 1 unsupported");
    }
    return Params{m, p, gamma};
}

}  // namespace dnlw
