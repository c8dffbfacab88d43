#include <dnlw/reaction.hpp>

#include <cmath>
#include <string>

namespace dnlw {

const char* to_string(ReactionKind k) {
    switch (k) {
        case ReactionKind::TypeC: return "C";
        case ReactionKind::TypeCPrime: return "Cprime";
        case ReactionKind::Kpp: return "Kpp";
    }
    return "?";
}

Reaction::Reaction(ReactionKind kind, Model model, double a)
    : kind_(kind), model_(model), a_(a) {}

Reaction Reaction::cubic(ReactionKind kind, double a) {
    if (kind == ReactionKind::Kpp) {
        throw DomainError("Reaction::cubic: Kpp reactions come from scale_to_kpp");
    }
    if (!(a > 0.0 && a < 1.0)) {
        throw DomainError("Reaction::cubic: a must lie in (0,1)");
    }
    Reaction r(kind, kind == ReactionKind::TypeC ? Model::CubicC : Model::CubicCPrime, a);
    r.validate();
    return r;
}

Reaction Reaction::tabulated(ReactionKind kind, double a, std::vector<double> u,
                             std::vector<double> f) {
    const bool kpp = kind == ReactionKind::Kpp;
    if (!kpp && !(a > 0.0 && a < 1.0)) {
        throw DomainError("Reaction::tabulated: a must lie in (0,1)");
    }
    if (u.empty() || u.front() != 0.0 || u.back() != 1.0) {
        throw DomainError("Reaction::tabulated: table must span [0,1]");
    }
    Reaction r(kind, Model::Tabulated, kpp ? 1.0 : a);
    r.table_ = Pchip(std::move(u), std::move(f));
    r.validate();
    return r;
}

double Reaction::f(double u) const {
    switch (model_) {
        case Model::CubicC: return u * (1.0 - u) * (u - a_);
        case Model::CubicCPrime: return u * (1.0 - u) * (a_ - u);
        case Model::KppScaledCubic: return scale_ * u * (1.0 - u) * (1.0 - scale_ * u);
        case Model::Tabulated: return table_(u);
    }
    return 0.0;
}

double Reaction::fprime(double u) const {
    switch (model_) {
        case Model::CubicC: return -3.0 * u * u + 2.0 * (1.0 + a_) * u - a_;
        case Model::CubicCPrime: return 3.0 * u * u - 2.0 * (1.0 + a_) * u + a_;
        case Model::KppScaledCubic:
            return scale_ * (1.0 - 2.0 * (1.0 + scale_) * u + 3.0 * scale_ * u * u);
        case Model::Tabulated: return table_.derivative(u);
    }
    return 0.0;
}

std::pair<double, double> Reaction::positivity_interval() const {
    switch (kind_) {
        case ReactionKind::TypeC: return {a_, 1.0};
        case ReactionKind::TypeCPrime: return {0.0, a_};
        case ReactionKind::Kpp: return {0.0, 1.0};
    }
    return {0.0, 1.0};
}

void Reaction::validate() {
    const double ztol = 1e-12;
    auto check_zero = [&](double u) {
        if (std::fabs(f(u)) > ztol) {
            throw DomainError("Reaction: f(" + std::to_string(u) + ") != 0");
        }
    };
    check_zero(0.0);
    check_zero(1.0);
    if (kind_ != ReactionKind::Kpp) check_zero(a_);

    const int n = 1000;
    for (int i = 1; i < n; ++i) {
        const double u = static_cast<double>(i) / n;
        if (std::fabs(u - a_) < 1e-9 || u < 1e-9 || u > 1.0 - 1e-9) continue;
        const double v = f(u);
        bool ok = true;
        switch (kind_) {
            case ReactionKind::TypeC: ok = (u < a_) ? (v < 0.0) : (v > 0.0); break;
            case ReactionKind::TypeCPrime: ok = (u < a_) ? (v > 0.0) : (v < 0.0); break;
            case ReactionKind::Kpp: ok = v > 0.0; break;
        }
        if (!ok) {
            throw DomainError("Reaction: sign pattern violated at u=" + std::to_string(u));
        }
    }
    switch (kind_) {
        case ReactionKind::TypeC:
            if (!(fprime(0.0) < 0.0)) throw DomainError("TypeC requires f'(0) < 0");
            break;
        case ReactionKind::TypeCPrime:
            if (!(fprime(1.0) > 0.0)) throw DomainError("TypeCPrime requires f'(1) > 0");
            break;
        case ReactionKind::Kpp:
            if (!(fprime(0.0) > 0.0 && fprime(1.0) < 0.0)) {
                throw DomainError("Kpp requires f'(0) > 0 and f'(1) < 0");
            }
            break;
    }
    lipschitz_ = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        lipschitz_ = std::max(lipschitz_, std::fabs(fprime(i / 2000.0)));
    }
}

double f_mp(const Params& params, const Reaction& reaction, double X) {
    const double expo = params.gamma / (params.p - 1.0) - 1.0;
    if (X <= 0.0) {
        // limit of m f'(0) X^{gamma/(p-1)} as X -> 0+
        return params.gamma == 0.0 ? params.m * reaction.fprime(0.0) : 0.0;
    }
    return params.m * std::pow(X, expo) * reaction.f(X);
}

double weighted_integral(const Reaction& reaction, double m, double upper) {
    if (!(m > 0.0)) throw DomainError("weighted_integral: m must be positive");
    if (upper < 0.0 || upper > 1.0) {
        throw DomainError("weighted_integral: upper must lie in [0,1]");
    }
    if (upper == 0.0) return 0.0;
    if (reaction.is_cubic()) {
        // integral of u^{m-1} * cubic has an elementary antiderivative
        const double a = reaction.a();
        const double s = reaction.scale_;
        const double u1 = std::pow(upper, m + 1.0) / (m + 1.0);
        const double u2 = std::pow(upper, m + 2.0) / (m + 2.0);
        const double u3 = std::pow(upper, m + 3.0) / (m + 3.0);
        switch (reaction.kind()) {
            case ReactionKind::TypeC: return -u3 + (1.0 + a) * u2 - a * u1;
            case ReactionKind::TypeCPrime: return u3 - (1.0 + a) * u2 + a * u1;
            case ReactionKind::Kpp: return s * (u1 - (1.0 + s) * u2 + s * u3);
        }
    }
    auto g = [&](double u) { return std::pow(u, m - 1.0) * reaction.f(u); };
    if (m >= 1.0) {
        return adaptive_simpson(g, 0.0, upper, 1e-10);
    }
    // endpoint-weighted head: f(u) ~ f'(0) u near 0 removes the u^{m-1} singularity
    const double eps = std::min(1e-6, 0.5 * upper);
    const double head = reaction.fprime(0.0) * std::pow(eps, m + 1.0) / (m + 1.0);
    return head + adaptive_simpson(g, eps, upper, 1e-10);
}

std::pair<Reaction, double> scale_to_kpp(const Reaction& reaction, const Params& params) {
    if (reaction.kind() != ReactionKind::TypeCPrime) {
        throw DomainError("scale_to_kpp: reaction must be TypeCPrime");
    }
    const double a = reaction.a();
    const double factor = std::pow(a, params.gamma / params.p);
    if (reaction.is_cubic()) {
        Reaction r(ReactionKind::Kpp, Reaction::Model::KppScaledCubic, 1.0);
        r.scale_ = a;
        r.validate();
        return {r, factor};
    }
    const int n = 2000;
    std::vector<double> w(n + 1), g(n + 1);
    for (int i = 0; i <= n; ++i) {
        w[i] = static_cast<double>(i) / n;
        g[i] = reaction.f(a * w[i]) / a;
    }
    g.front() = 0.0;
    g.back() = 0.0;
    return {Reaction::tabulated(ReactionKind::Kpp, 1.0, std::move(w), std::move(g)), factor};
}

}  // namespace dnlw
