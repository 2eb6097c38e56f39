#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rfsi/errors.hpp"
#include "rfsi/geometry.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

struct MaterialParams {
    double rho1 = 1.0;    ///< fluid density
    double c = 1.0;       ///< sound speed
    double rho2 = 1.0;    ///< solid density
    double mu = 1.0;
    double lambda = 1.0;

    void validate() const {
        auto require = [](bool ok, const std::string& what) {
            if (!ok) throw ValidationError("material constraint violated: " + what);
        };
        require(rho1 > 0.0 && std::isfinite(rho1), "rho1 > 0");
        require(c > 0.0 && std::isfinite(c), "c > 0");
        require(rho2 > 0.0 && std::isfinite(rho2), "rho2 > 0");
        require(std::isfinite(mu) && std::isfinite(lambda), "finite Lame parameters");
        require(mu > 0.0, "μ>0 (mu = " + std::to_string(mu) + ")");
        require(lambda + mu > 0.0, "λ+μ>0 (lambda + mu = " + std::to_string(lambda + mu) + ")");
    }
};

// ---------------------------------------------------------------------------
// Temporal profiles

enum class TemporalKind { zero, power_exp, sine, cosine, damped_sine, pulse, sampled };

/// Scalar time dependence of the source with a closed-form Laplace transform,
/// or a piecewise-linear sampled series that vanishes after its last sample.
struct TemporalProfile {
    TemporalKind kind = TemporalKind::zero;
    int power = 1;        ///< power_exp: t^power e^{-rate t}
    double rate = 1.0;    ///< power_exp, damped_sine: decay rate a
    double omega = 1.0;   ///< sine, cosine, damped_sine: angular frequency
    double duration = 1.0;  ///< pulse: sin^4(pi t / duration) on [0, duration]
    std::vector<double> t_samples;
    std::vector<double> a_samples;

    static TemporalProfile zero() { return {}; }
    static TemporalProfile power_exp(int n, double a) {
        TemporalProfile p;
        p.kind = TemporalKind::power_exp;
        p.power = n;
        p.rate = a;
        return p;
    }
    static TemporalProfile sine(double w) {
        TemporalProfile p;
        p.kind = TemporalKind::sine;
        p.omega = w;
        return p;
    }
    static TemporalProfile cosine(double w) {
        TemporalProfile p;
        p.kind = TemporalKind::cosine;
        p.omega = w;
        return p;
    }
    /// t^2 e^{-a t} sin(w t)
    static TemporalProfile damped_sine(double a, double w) {
        TemporalProfile p;
        p.kind = TemporalKind::damped_sine;
        p.rate = a;
        p.omega = w;
        return p;
    }
    static TemporalProfile pulse(double duration) {
        TemporalProfile p;
        p.kind = TemporalKind::pulse;
        p.duration = duration;
        return p;
    }
    static TemporalProfile sampled(std::vector<double> t, std::vector<double> a) {
        if (t.size() != a.size() || t.size() < 2) throw ValidationError("sampled profile needs at least two (t, a) pairs");
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!std::isfinite(t[k]) || !std::isfinite(a[k])) throw ValidationError("sampled profile has non-finite values");
            if (k > 0 && !(t[k] > t[k - 1])) throw ValidationError("sampled profile times must be strictly increasing");
        }
        if (t.front() != 0.0) throw ValidationError("sampled profile must start at t = 0");
        TemporalProfile p;
        p.kind = TemporalKind::sampled;
        p.t_samples = std::move(t);
        p.a_samples = std::move(a);
        return p;
    }

    double value(double t) const {
        if (t < 0.0) return 0.0;
        switch (kind) {
            case TemporalKind::zero: return 0.0;
            case TemporalKind::power_exp: return std::pow(t, power) * std::exp(-rate * t);
            case TemporalKind::sine: return std::sin(omega * t);
            case TemporalKind::cosine: return std::cos(omega * t);
            case TemporalKind::damped_sine: return t * t * std::exp(-rate * t) * std::sin(omega * t);
            case TemporalKind::pulse: {
                if (t > duration) return 0.0;
                const double v = std::sin(kPi * t / duration);
                return v * v * v * v;
            }
            case TemporalKind::sampled: return sampled_value(t);
        }
        return 0.0;
    }

    double derivative(double t) const {
        if (t < 0.0) return 0.0;
        switch (kind) {
            case TemporalKind::zero: return 0.0;
            case TemporalKind::power_exp: {
                const double lead = power == 0 ? 0.0 : power * std::pow(t, power - 1);
                return (lead - rate * std::pow(t, power)) * std::exp(-rate * t);
            }
            case TemporalKind::sine: return omega * std::cos(omega * t);
            case TemporalKind::cosine: return -omega * std::sin(omega * t);
            case TemporalKind::damped_sine:
                return std::exp(-rate * t) *
                       ((2.0 * t - rate * t * t) * std::sin(omega * t) + omega * t * t * std::cos(omega * t));
            case TemporalKind::pulse: {
                if (t > duration) return 0.0;
                const double x = kPi * t / duration;
                const double sx = std::sin(x);
                return 4.0 * sx * sx * sx * std::cos(x) * kPi / duration;
            }
            case TemporalKind::sampled: {
                const auto& ts = t_samples;
                if (t >= ts.back()) return 0.0;
                const auto k = segment(t);
                return (a_samples[k + 1] - a_samples[k]) / (ts[k + 1] - ts[k]);
            }
        }
        return 0.0;
    }

    /// Laplace transform at s (Re s > 0). Sampled series use composite
    /// trapezoid quadrature of e^{-st} a(t) over the sample nodes.
    cplx laplace(cplx s) const {
        if (!(s.real() > 0.0)) throw DomainError("Laplace transform requires Re s > 0");
        const cplx i(0.0, 1.0);
        switch (kind) {
            case TemporalKind::zero: return 0.0;
            case TemporalKind::power_exp: return std::tgamma(power + 1.0) / std::pow(s + rate, power + 1);
            case TemporalKind::sine: return omega / (s * s + omega * omega);
            case TemporalKind::cosine: return s / (s * s + omega * omega);
            case TemporalKind::damped_sine: {
                const cplx a = s + rate - i * omega;
                const cplx b = s + rate + i * omega;
                return (2.0 / (a * a * a) - 2.0 / (b * b * b)) / (2.0 * i);
            }
            case TemporalKind::pulse: {
                // sin^4 x = 3/8 - cos(2x)/2 + cos(4x)/8
                const double w1 = 2.0 * kPi / duration;
                const double w2 = 4.0 * kPi / duration;
                const cplx edge = 1.0 - std::exp(-s * duration);
                return edge * (3.0 / (8.0 * s) - s / (2.0 * (s * s + w1 * w1)) + s / (8.0 * (s * s + w2 * w2)));
            }
            case TemporalKind::sampled: {
                cplx acc = 0.0;
                for (std::size_t k = 0; k + 1 < t_samples.size(); ++k) {
                    const double dt = t_samples[k + 1] - t_samples[k];
                    acc += 0.5 * dt * (std::exp(-s * t_samples[k]) * a_samples[k] +
                                       std::exp(-s * t_samples[k + 1]) * a_samples[k + 1]);
                }
                return acc;
            }
        }
        return 0.0;
    }

    /// Total variation of the profile on [0, T], i.e. the integral of |tau'|.
    double derivative_l1(double T) const {
        if (kind == TemporalKind::zero) return 0.0;
        if (kind == TemporalKind::sampled) {
            double acc = 0.0;
            for (std::size_t k = 0; k + 1 < t_samples.size() && t_samples[k] < T; ++k) {
                const double t1 = std::min(t_samples[k + 1], T);
                acc += std::abs(derivative(t_samples[k])) * (t1 - t_samples[k]);
            }
            return acc;
        }
        if (kind == TemporalKind::pulse) {
            // rises monotonically to 1 at duration / 2, then falls back to 0
            if (T <= 0.5 * duration) return value(T);
            return T >= duration ? 2.0 : 2.0 - value(T);
        }
        return integrate(T, [this](double t) { return std::abs(derivative(t)); });
    }

    /// sqrt(int_0^T tau^2 + tau'^2 dt)
    double h1_norm(double T) const {
        if (kind == TemporalKind::zero) return 0.0;
        return std::sqrt(integrate(T, [this](double t) {
            const double v = value(t), d = derivative(t);
            return v * v + d * d;
        }));
    }

private:
    std::size_t segment(double t) const {
        const auto it = std::upper_bound(t_samples.begin(), t_samples.end(), t);
        const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - t_samples.begin() - 1));
        return std::min(k, t_samples.size() - 2);
    }

    double sampled_value(double t) const {
        if (t > t_samples.back()) return 0.0;
        const auto k = segment(t);
        const double w = (t - t_samples[k]) / (t_samples[k + 1] - t_samples[k]);
        return (1.0 - w) * a_samples[k] + w * a_samples[k + 1];
    }

    template <class F>
    static double integrate(double T, F&& f) {
        const int n = 20000;
        const double dt = T / n;
        double acc = 0.5 * (f(0.0) + f(T));
        for (int k = 1; k < n; ++k) acc += f(k * dt);
        return acc * dt;
    }
};

inline TemporalProfile load_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open source profile: " + path);
    std::string line;
    std::getline(in, line);
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
               line.end());
    if (line != "t,amplitude") throw ValidationError(path + ": header must be `t,amplitude`");
    std::vector<double> t, a;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double tv = 0.0, av = 0.0;
        if (!(ls >> tv >> av)) throw ValidationError(path + ":" + std::to_string(lineno) + ": expected two numbers");
        t.push_back(tv);
        a.push_back(av);
    }
    return TemporalProfile::sampled(std::move(t), std::move(a));
}

// ---------------------------------------------------------------------------
// Spatial profile

/// Vector bump amplitude * direction * prod_d cos^4(pi d_d / (2 r_d)), with
/// laterally periodic distances d_x, d_y. Twice continuously differentiable.
struct SpatialBump {
    Vec3 center{0.0, 0.0, -0.5};
    Vec3 radius{0.25, 0.25, 0.25};
    Vec3 direction{0.0, 0.0, 1.0};
    double amplitude = 1.0;
    double period = 1.0;

    Vec3 value(const Vec3& x) const {
        const double w = amplitude * envelope(x);
        return {w * direction[0], w * direction[1], w * direction[2]};
    }

    double envelope(const Vec3& x) const {
        double w = 1.0;
        for (int d = 0; d < 3; ++d) {
            double dist = x[d] - center[d];
            if (d < 2) dist -= period * std::round(dist / period);
            const double r = std::abs(dist) / radius[d];
            if (r >= 1.0) return 0.0;
            const double c = 0.5 * (1.0 + std::cos(kPi * r));
            w *= c * c;
        }
        return w;
    }
};

struct SourceTerm {
    SpatialBump spatial;
    TemporalProfile temporal;

    bool is_zero() const { return temporal.kind == TemporalKind::zero || spatial.amplitude == 0.0; }

    Vec3 value(const Vec3& x, double t) const {
        const double tau = temporal.value(t);
        auto v = spatial.value(x);
        for (auto& e : v) e *= tau;
        return v;
    }

    SourceTerm scaled(double factor) const {
        SourceTerm out = *this;
        out.spatial.amplitude *= factor;
        return out;
    }
};

/// Laplace-domain source: spatial profile times a complex multiplier.
struct TransformedSource {
    SpatialBump spatial;
    cplx factor = 0.0;

    std::array<cplx, 3> value(const Vec3& x) const {
        const auto v = spatial.value(x);
        return {factor * v[0], factor * v[1], factor * v[2]};
    }
};

inline TransformedSource transform_source(const SourceTerm& j, cplx s) {
    if (!(s.real() > 0.0)) throw DomainError("source transform requires Re s > 0");
    TransformedSource out{j.spatial, 0.0};
    if (j.is_zero()) return out;
    out.factor = j.temporal.laplace(s);
    return out;
}

/// L2 norm of a spatial vector profile over the solid slab, with the same
/// 2 x 2 x 2 Gauss rule used by the assembly.
inline double spatial_l2_norm(const SpatialBump& b, const SlabMesh& solid) {
    if (b.amplitude == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& q : solid.qpoints) {
        const auto v = b.value(q.x);
        acc += q.weight * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    return std::sqrt(acc);
}

struct SourceReport {
    bool valid = true;
    double initial_value = 0.0;      ///< |tau(0)|
    double temporal_h1 = 0.0;        ///< H1(0,T) norm of tau
    double spatial_l2 = 0.0;         ///< L2 norm of the spatial profile over the solid
    double dt_l1_l2 = 0.0;           ///< L1(0,T; L2) norm of the time derivative of j
    double support_margin = 0.0;     ///< distance of the support box to the nearest excluded layer
};

/// Checks j(0) = 0, a finite temporal H1 norm and a support that stays at
/// least one cell layer away from the interface and the bottom.
inline SourceReport validate_source(const SourceTerm& j, const MappedMesh& mesh, double T) {
    if (!(T > 0.0)) throw ValidationError("time horizon must be positive");
    SourceReport r;
    if (j.is_zero()) return r;
    for (int d = 0; d < 3; ++d) {
        if (!(j.spatial.radius[d] > 0.0)) throw ValidationError("source radius must be positive");
    }
    r.initial_value = std::abs(j.temporal.value(0.0));
    if (r.initial_value > 1e-14) {
        throw ValidationError("initial compatibility violated: source profile is " +
                              std::to_string(j.temporal.value(0.0)) + " at t = 0");
    }
    r.temporal_h1 = j.temporal.h1_norm(T);
    if (!std::isfinite(r.temporal_h1)) throw ValidationError("source temporal H1 norm is not finite");

    const auto& m = mesh.solid;
    const double zlo = j.spatial.center[2] - j.spatial.radius[2];
    const double zhi = j.spatial.center[2] + j.spatial.radius[2];
    double margin = std::numeric_limits<double>::infinity();
    for (int jj = 0; jj < m.n; ++jj) {
        for (int ii = 0; ii < m.n; ++ii) {
            const double low = m.z[m.node(ii, jj, 1)];
            const double high = m.z[m.node(ii, jj, m.nz - 1)];
            margin = std::min({margin, zlo - low, high - zhi});
        }
    }
    r.support_margin = margin;
    if (margin < 0.0) {
        throw ValidationError("source support must stay at least one cell layer away from the interface and the bottom "
                              "(margin " + std::to_string(margin) + ")");
    }
    r.spatial_l2 = spatial_l2_norm(j.spatial, m);
    r.dt_l1_l2 = r.spatial_l2 * j.temporal.derivative_l1(T);
    return r;
}

}  // namespace rfsi
