#include "pvarlevy/marcus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pvarlevy/errors.hpp"

namespace pvarlevy {

const char* to_string(FieldFamily f) {
    switch (f) {
        case FieldFamily::Linear: return "linear";
        case FieldFamily::Affine: return "affine";
        case FieldFamily::SmoothBounded: return "smooth_bounded";
    }
    return "?";
}

VectorFieldSpec VectorFieldSpec::linear(std::size_t m, std::vector<std::vector<double>> matrices) {
    VectorFieldSpec f;
    f.family = FieldFamily::Linear;
    f.m = m;
    f.d = matrices.size();
    f.matrices = std::move(matrices);
    f.validate();
    return f;
}

VectorFieldSpec VectorFieldSpec::affine(std::size_t m, std::vector<std::vector<double>> matrices,
                                        std::vector<Point> offsets) {
    VectorFieldSpec f;
    f.family = FieldFamily::Affine;
    f.m = m;
    f.d = matrices.size();
    f.matrices = std::move(matrices);
    f.offsets = std::move(offsets);
    f.validate();
    return f;
}

VectorFieldSpec VectorFieldSpec::sin_cos(std::size_t m, std::size_t d, double amplitude, double frequency) {
    VectorFieldSpec f;
    f.family = FieldFamily::SmoothBounded;
    f.m = m;
    f.d = d;
    f.amplitude = amplitude;
    f.frequency = frequency;
    f.validate();
    return f;
}

VectorFieldSpec VectorFieldSpec::zero(std::size_t m, std::size_t d) {
    return linear(m, std::vector<std::vector<double>>(d, std::vector<double>(m * m, 0.0)));
}

void VectorFieldSpec::validate() const {
    if (m == 0 || d == 0) throw ValidationError("vector field dimensions must be positive");
    switch (family) {
        case FieldFamily::Affine:
            if (offsets.size() != d) throw ValidationError("affine field needs one offset per input coordinate");
            for (const auto& b : offsets)
                if (b.dim() != m || !b.is_finite()) throw ValidationError("affine offset dimension mismatch");
            [[fallthrough]];
        case FieldFamily::Linear:
            if (matrices.size() != d) throw ValidationError("field needs one matrix per input coordinate");
            for (const auto& a : matrices) {
                if (a.size() != m * m) throw ValidationError("field matrix must be m x m");
                for (double x : a)
                    if (!std::isfinite(x)) throw ValidationError("field matrix entries must be finite");
            }
            break;
        case FieldFamily::SmoothBounded:
            if (catalog != "sin_cos") throw ValidationError("unknown smooth_bounded catalog id '" + catalog + "'");
            if (!std::isfinite(amplitude) || !std::isfinite(frequency))
                throw ValidationError("smooth_bounded parameters must be finite");
            if (!phases.empty() && phases.size() != d) throw ValidationError("need one phase per input coordinate");
            break;
    }
}

Point VectorFieldSpec::apply(const Point& x, const Point& dz) const {
    Point out(m);
    for (std::size_t j = 0; j < d; ++j) {
        const double z = dz[j];
        if (z == 0.0) continue;
        if (family == FieldFamily::SmoothBounded) {
            const double ph = phases.empty() ? 0.0 : phases[j];
            for (std::size_t i = 0; i < m; ++i) {
                double arg = frequency * x[(i + j) % m] + ph;
                out[i] += amplitude * (j % 2 == 0 ? std::sin(arg) : std::cos(arg)) * z;
            }
            continue;
        }
        const auto& a = matrices[j];
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += a[i * m + k] * x[k];
            if (family == FieldFamily::Affine) s += offsets[j][i];
            out[i] += s * z;
        }
    }
    return out;
}

double VectorFieldSpec::amplitude_bound() const {
    if (family != FieldFamily::SmoothBounded) return std::numeric_limits<double>::infinity();
    return std::abs(amplitude) * std::sqrt(static_cast<double>(m * d));
}

double VectorFieldSpec::derivative_bound() const {
    if (family == FieldFamily::SmoothBounded) return std::abs(amplitude * frequency) * std::sqrt(static_cast<double>(m * d));
    double s = 0.0;
    for (const auto& a : matrices)
        for (double x : a) s += x * x;
    return std::sqrt(s);
}

void MarcusSystem::validate() const {
    f.validate();
    if (x0.dim() != f.m || !x0.is_finite()) throw ValidationError("x0 must have the state dimension");
    if (ode.steps < 16) throw ValidationError("ode steps must be >= 16");
    if (ode.output_substeps < 0) throw ValidationError("output_substeps must be >= 0");
    if (!(ode.tolerance > 0.0)) throw ValidationError("ode tolerance must be positive");
}

namespace {

int step_count(const Point& dz, const OdeConfig& ode) {
    double scale = std::max(1.0, std::ceil(dz.norm()));
    if (scale > 1e6) throw NumericalError("jump too large for the fixed-step flow");
    return ode.steps * static_cast<int>(scale);
}

// n RK4 steps of y' = f(y) dz over [0, 1]; `trace` receives every
// `stride`-th intermediate state when non-null.
Point rk4(const VectorFieldSpec& f, Point y, const Point& dz, int n, std::vector<Point>* trace = nullptr,
          int stride = 1) {
    const double h = 1.0 / n;
    for (int k = 0; k < n; ++k) {
        Point k1 = f.apply(y, dz);
        Point k2 = f.apply(y + (0.5 * h) * k1, dz);
        Point k3 = f.apply(y + (0.5 * h) * k2, dz);
        Point k4 = f.apply(y + h * k3, dz);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (trace && (k + 1) % stride == 0 && k + 1 < n) trace->push_back(y);
    }
    if (!y.is_finite()) throw NumericalError("flow left the finite range");
    return y;
}

Point checked_flow(const VectorFieldSpec& f, const Point& x, const Point& dz, const OdeConfig& ode,
                   std::vector<Point>* trace = nullptr, int stride = 1) {
    if (dz.norm() == 0.0) return x;
    const int n = step_count(dz, ode);
    if (!ode.richardson_check) return rk4(f, x, dz, n, trace, stride);
    Point coarse = rk4(f, x, dz, n);
    Point fine = rk4(f, x, dz, 2 * n, trace, 2 * stride);
    double diff = (fine - coarse).norm();
    if (!(diff <= ode.tolerance))
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "Richardson check failed: |flow(n) - flow(2n)| = %.3g exceeds %.3g; increase ode steps",
                      diff, ode.tolerance);
        throw NumericalError(buf);
    }
    return fine;
}

}  // namespace

Point marcus_jump_map(const VectorFieldSpec& f, const Point& x, const Point& dz, const OdeConfig& ode) {
    if (x.dim() != f.m || dz.dim() != f.d) throw ValidationError("jump map: dimension mismatch");
    return checked_flow(f, x, dz, ode);
}

Point marcus_correction(const VectorFieldSpec& f, const Point& x, const Point& dz, const OdeConfig& ode) {
    return marcus_jump_map(f, x, dz, ode) - x - f.apply(x, dz);
}

CadlagPath solve_marcus(const MarcusSystem& sys, const CadlagPath& drive) {
    sys.validate();
    if (drive.dim() != sys.f.d) throw ValidationError("drive dimension differs from the field input dimension");
    if (drive.empty()) throw ValidationError("empty drive");
    const int sub = sys.ode.output_substeps;
    PathBuilder out(sys.f.m);
    Point x = sys.x0;
    out.add(drive.time(0), x);
    for (std::size_t i = 1; i < drive.size(); ++i) {
        const double t0 = drive.time(i - 1), t1 = drive.time(i);
        Point dz = drive.point(i) - drive.point(i - 1);
        if (drive.kind(i) == NodeKind::PostJump) {
            Point y = checked_flow(sys.f, x, dz, sys.ode);
            out.add_jump(t1, x, y);
            x = std::move(y);
            continue;
        }
        if (sub == 0 || dz.norm() == 0.0) {
            x = checked_flow(sys.f, x, dz, sys.ode);
        } else {
            // record `sub` evenly spaced interior states of the segment
            const int n = step_count(dz, sys.ode);
            int stride = std::max(1, n / (sub + 1));
            std::vector<Point> trace;
            Point y = checked_flow(sys.f, x, dz, sys.ode, &trace, stride);
            const int per = sys.ode.richardson_check ? 2 * n : n;
            const int st = sys.ode.richardson_check ? 2 * stride : stride;
            for (std::size_t k = 0; k < trace.size(); ++k) {
                double frac = static_cast<double>((k + 1) * st) / per;
                double t = t0 + frac * (t1 - t0);
                if (t > t0 && t < t1) out.add(t, trace[k]);
            }
            x = std::move(y);
        }
        // a left limit is emitted together with its jump
        if (drive.kind(i) != NodeKind::PreJump) out.add(t1, x);
    }
    return std::move(out).build();
}

CadlagPath support_drive(const SupportCurveSpec& spec) {
    const CadlagPath& phi = spec.phi_L;
    if (phi.empty()) throw ValidationError("support curve phi_L is empty");
    if (phi.has_jumps()) throw ValidationError("support curve phi_L must be continuous");
    if (phi.start_time() != 0.0) throw ValidationError("support curve must start at time 0");
    if (spec.alpha_nu.dim() != phi.dim()) throw ValidationError("alpha_nu dimension mismatch");
    const double T = phi.end_time();
    double last = 0.0;
    PathBuilder b(phi.dim());
    Point x(phi.dim());
    b.add(0.0, x);
    for (const auto& j : spec.jumps) {
        if (!(j.time > last) || j.time > T) throw ValidationError("support jump times must increase inside (0, T]");
        if (j.size.dim() != phi.dim()) throw ValidationError("support jump dimension mismatch");
        Point pre = x + (j.time - last) * spec.alpha_nu;
        Point post = pre + j.size;
        b.add_jump(j.time, pre, post);
        x = std::move(post);
        last = j.time;
    }
    if (last < T) b.add(T, x + (T - last) * spec.alpha_nu);
    return combine(phi, std::move(b).build(), 1.0, 1.0);
}

CadlagPath solve_support_ode(const SupportCurveSpec& spec, const VectorFieldSpec& f, const Point& x0,
                             const OdeConfig& ode) {
    return solve_marcus({f, x0, ode}, support_drive(spec));
}

ProbeResult continuity_probe(const MarcusSystem& sys, const CadlagPath& driveA, const CadlagPath& driveB,
                             const Point& xA, const Point& xB, double T, double p) {
    MarcusSystem a = sys, b = sys;
    a.x0 = xA;
    b.x0 = xB;
    CadlagPath da = restrict(driveA, 0.0, T), db = restrict(driveB, 0.0, T);
    CadlagPath sa = solve_marcus(a, da), sb = solve_marcus(b, db);
    ProbeResult r;
    r.numerator = pvar_exact(combine(sa, sb, 1.0, -1.0), p).value;
    r.denominator = distance(xA, xB) + pvar_exact(combine(da, db, 1.0, -1.0), p).value;
    if (r.denominator <= 1e-12) {
        if (r.numerator > 1e-12) throw NumericalError("continuity probe: zero denominator");
        r.degenerate = true;
        return r;
    }
    r.ratio = r.numerator / r.denominator;
    return r;
}

SupportDistance support_distance(const CadlagPath& sample, const CadlagPath& candidate, double p, int n) {
    if (n < 1) throw ValidationError("support distance: n must be >= 1");
    for (const auto* path : {&sample, &candidate})
        if (path->empty() || path->start_time() > 0.0 || path->end_time() < n + 1)
            throw ValidationError("support distance: paths must cover [0, n+1]");
    SkorohodSearch s = skorohod_search(sample, candidate, p, n);
    SupportDistance out;
    out.value = s.value;
    out.family = s.family;
    auto count = [&](const CadlagPath& x) {
        std::size_t c = 0;
        for (const auto& j : jump_list(x)) c += j.time < n + 1;
        return c;
    };
    out.aligned = count(sample) == count(candidate);
    return out;
}

CadlagPath support_candidate_drive(const CadlagPath& drive, double threshold, int pieces) {
    if (pieces < 1) throw ValidationError("pieces must be >= 1");
    const double t0 = drive.start_time(), T = drive.end_time();
    PathBuilder big(drive.dim());
    Point x(drive.dim());
    big.add(t0, x);
    double last = t0;
    for (const auto& j : jump_list(drive)) {
        if (j.size.norm() < threshold) continue;
        big.add_jump(j.time, x, x + j.size);
        x += j.size;
        last = j.time;
    }
    if (last < T) big.add(T, x);
    CadlagPath bigp = std::move(big).build();
    CadlagPath rest = combine(drive, bigp, 1.0, -1.0);
    PathBuilder poly(drive.dim());
    for (int k = 0; k <= pieces; ++k) {
        double t = k == pieces ? T : t0 + (T - t0) * k / pieces;
        poly.add(t, evaluate(rest, t));
    }
    return combine(std::move(poly).build(), bigp, 1.0, 1.0);
}

}  // namespace pvarlevy
