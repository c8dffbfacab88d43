#pragma once

#include <utility>
#include <vector>

#include <dnlw/numerics.hpp>
#include <dnlw/params.hpp>

namespace dnlw {

enum class ReactionKind {
    TypeC,       // bistable: f<0 on (0,a), f>0 on (a,1)
    TypeCPrime,  // monostable toward a: f>0 on (0,a), f<0 on (a,1)
    Kpp,         // Fisher-KPP on [0,1]: f>0 on (0,1); produced by scale_to_kpp
};

const char* to_string(ReactionKind k);

/// Reaction term f on [0,1] with its derivative.  Either the built-in cubic
/// family (modeled on u(1-u)(u-a) / u(1-u)(a-u)) or a tabulated profile with
/// monotone-cubic interpolation.  The sign pattern implied by the kind is
/// validated on a 1000-point grid at construction; a violation anywhere is an
/// error, because all the phase-plane analysis rests on it.
class Reaction {
public:
    static Reaction cubic(ReactionKind kind, double a);
    static Reaction tabulated(ReactionKind kind, double a, std::vector<double> u,
                              std::vector<double> f);

    double f(double u) const;
    double fprime(double u) const;
    double operator()(double u) const { return f(u); }

    ReactionKind kind() const { return kind_; }
    double a() const { return a_; }
    bool is_cubic() const { return model_ != Model::Tabulated; }

    /// Saddle abscissa of the phase-plane analysis: 1 for TypeC and Kpp
    /// (point S), a for TypeCPrime (point A).
    double saddle_abscissa() const { return kind_ == ReactionKind::TypeCPrime ? a_ : 1.0; }

    /// Interval (lo, hi) where f > 0; the null-isocline bound is taken there.
    std::pair<double, double> positivity_interval() const;

    /// max |f'| over [0,1]; used for the reaction CFL cap.
    double max_abs_fprime() const { return lipschitz_; }

private:
    enum class Model { CubicC, CubicCPrime, KppScaledCubic, Tabulated };

    Reaction(ReactionKind kind, Model model, double a);
    void validate();

    ReactionKind kind_;
    Model model_;
    double a_;          // intermediate zero (1 for Kpp)
    double scale_ = 1;  // KppScaledCubic parameter (the original a)
    Pchip table_;
    double lipschitz_ = 0;

    friend std::pair<Reaction, double> scale_to_kpp(const Reaction&, const Params&);
    friend double weighted_integral(const Reaction&, double, double);
};

/// f_{m,p}(X) = m X^{gamma/(p-1)-1} f(X); preserves the zeros and the sign of
/// f on (0,1].  At X = 0 the limiting value m f'(0) X^{gamma/(p-1)} is used,
/// which is m f'(0) for gamma = 0 and 0 for gamma > 0.
double f_mp(const Params& params, const Reaction& reaction, double X);

/// Integral of u^{m-1} f(u) over [0, upper]; closed form for the cubics,
/// adaptive Simpson (abs tol 1e-10) otherwise, with the [0, eps] head handled
/// analytically when 0 < m < 1.
double weighted_integral(const Reaction& reaction, double m, double upper);

/// Maps a TypeCPrime reaction to the Fisher-KPP problem on [0,1] it embeds:
/// returns the rescaled reaction f_kpp(w) = f(a w)/a and the spatial scaling
/// factor a^{gamma/p} of the map y = a^{gamma/p} x.  Wave speeds transfer as
/// c_original = factor * c_kpp.
std::pair<Reaction, double> scale_to_kpp(const Reaction& reaction, const Params& params);

}  // namespace dnlw
