#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ssim {

enum class PowerKind { polynomial, pathological };

/// Power drawn by the processor as a function of speed.
///
/// Two families are supported:
///   - polynomial:   P(s) = s^alpha on [0, inf), alpha > 1
///   - pathological: P(s) = (4(2-s))^(-1/4) on [0, 2)
///
/// Both admit closed-form inverses and derivatives, so no root finding is
/// involved anywhere. Speeds outside the domain are hard errors: a policy
/// requesting such a speed is a bug the simulator must surface, not clamp.
class PowerFunction {
public:
    static PowerFunction polynomial(double alpha) {
        if (!(alpha > 1.0)) {
            throw std::invalid_argument("PowerFunction::polynomial: alpha must be > 1, got " +
                                        std::to_string(alpha));
        }
        return PowerFunction(PowerKind::polynomial, alpha);
    }

    static PowerFunction pathological() {
        return PowerFunction(PowerKind::pathological, 0.0);
    }

    PowerKind kind() const { return kind_; }
    bool is_polynomial() const { return kind_ == PowerKind::polynomial; }

    /// Exponent of the polynomial family. Invalid for the pathological kind.
    double alpha() const {
        if (kind_ != PowerKind::polynomial) {
            throw std::logic_error("PowerFunction::alpha: not a polynomial power function");
        }
        return alpha_;
    }

    /// Exclusive upper bound of the admissible speed range.
    double domain_upper() const {
        return kind_ == PowerKind::polynomial ? std::numeric_limits<double>::infinity() : 2.0;
    }

    bool in_domain(double s) const { return s >= 0.0 && s < domain_upper(); }

    double eval(double s) const {
        check_domain(s);
        if (kind_ == PowerKind::polynomial) {
            return std::pow(s, alpha_);
        }
        return std::pow(4.0 * (2.0 - s), -0.25);
    }

    double operator()(double s) const { return eval(s); }

    /// Unique s with P(s) = y. Closed form per kind.
    double inverse(double y) const {
        const double floor = kind_ == PowerKind::polynomial ? 0.0 : eval(0.0);
        if (!(y >= floor)) {
            throw std::domain_error("PowerFunction::inverse: y=" + std::to_string(y) +
                                    " below P(0)=" + std::to_string(floor));
        }
        if (kind_ == PowerKind::polynomial) {
            return std::pow(y, 1.0 / alpha_);
        }
        // y = (4(2-s))^(-1/4)  =>  s = 2 - y^(-4)/4
        return 2.0 - 0.25 * std::pow(y, -4.0);
    }

    /// P'(s) in closed form: alpha*s^(alpha-1), or (P(s))^5 for the pathological kind.
    double derivative(double s) const {
        check_domain(s);
        if (kind_ == PowerKind::polynomial) {
            return alpha_ * std::pow(s, alpha_ - 1.0);
        }
        const double p = eval(s);
        return p * p * p * p * p;
    }

    bool operator==(const PowerFunction& other) const {
        return kind_ == other.kind_ && (kind_ == PowerKind::pathological || alpha_ == other.alpha_);
    }

private:
    PowerFunction(PowerKind kind, double alpha) : kind_(kind), alpha_(alpha) {}

    void check_domain(double s) const {
        if (!(s >= 0.0) || s >= domain_upper()) {
            throw std::domain_error("PowerFunction: speed " + std::to_string(s) +
                                    " outside [0, " + std::to_string(domain_upper()) + ")");
        }
    }

    PowerKind kind_;
    double alpha_;
};

inline PowerFunction make_polynomial(double alpha) { return PowerFunction::polynomial(alpha); }
inline PowerFunction make_pathological() { return PowerFunction::pathological(); }

} // namespace ssim
