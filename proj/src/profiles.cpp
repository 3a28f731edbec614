#include "critlab/profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace critlab {

namespace {

// 8-point Gauss-Legendre rule on [-1,1], used to build the kernel tables.
constexpr double kGlx8[4] = {0.18343464249564980, 0.52553240991632899,
                             0.79666647741362674, 0.96028985649753623};
constexpr double kGlw8[4] = {0.36268378337836198, 0.31370664587788729,
                             0.22238103445337447, 0.10122853629037626};

double rawBump(double u) {
    const double s = 1.0 - u * u;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

template <class F>
double gl8(double a, double b, F f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) {
        acc += kGlw8[j] * (f(mid + half * kGlx8[j]) + f(mid - half * kGlx8[j]));
    }
    return acc * half;
}

}  // namespace

const BumpKernel& BumpKernel::instance() {
    static const BumpKernel k;
    return k;
}

BumpKernel::BumpKernel() : n_(4096), h_(2.0 / 4096) {
    F_.assign(n_ + 1, 0.0);
    M_.assign(n_ + 1, 0.0);
    double accF = 0.0, accM = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double a = -1.0 + i * h_, b = a + h_;
        accF += gl8(a, b, rawBump);
        accM += gl8(a, b, [](double u) { return u * rawBump(u); });
        F_[i + 1] = accF;
        M_[i + 1] = accM;
    }
    c_ = 1.0 / accF;
    for (int i = 0; i <= n_; ++i) {
        F_[i] *= c_;
        M_[i] *= c_;
    }
    // The kernel is even, so the total first moment vanishes; pin the endpoint
    // values so the piecewise-linear convolution identities hold exactly.
    F_[n_] = 1.0;
    M_[n_] = 0.0;
}

double BumpKernel::value(double u) const { return c_ * rawBump(u); }

double BumpKernel::d1(double u) const {
    const double s = 1.0 - u * u;
    if (s <= 0.0) return 0.0;
    return value(u) * (-2.0 * u / (s * s));
}

double BumpKernel::d2(double u) const {
    const double s = 1.0 - u * u;
    if (s <= 0.0) return 0.0;
    const double s2 = s * s;
    const double g = -2.0 * u / s2;                       // (log phi)'
    const double gp = -2.0 / s2 - 8.0 * u * u / (s2 * s); // (log phi)''
    return value(u) * (g * g + gp);
}

double BumpKernel::interp(const std::vector<double>& table, bool isCdf, double u) const {
    const double x = (u + 1.0) / h_;
    int i = static_cast<int>(x);
    if (i < 0) i = 0;
    if (i >= n_) i = n_ - 1;
    const double t = x - i;
    const double u0 = -1.0 + i * h_, u1 = u0 + h_;
    const double y0 = table[i], y1 = table[i + 1];
    const double d0 = isCdf ? value(u0) : u0 * value(u0);
    const double d1v = isCdf ? value(u1) : u1 * value(u1);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h_ * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h_ * d1v;
}

double BumpKernel::cdf(double u) const {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return interp(F_, true, u);
}

double BumpKernel::moment(double u) const {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return interp(M_, false, u);
}

double BumpKernel::ramp(double u) const {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return u;
    return u * cdf(u) - moment(u);
}

namespace {

double expInv(double u) { return std::exp(-1.0 / u); }  // B(u) for u > 0

// Below this margin B(u)/B(1-u) < 1e-43; treating the step as exactly 0/1
// avoids denormal blowups in the derivative quotients.
constexpr double kStepClamp = 0.01;

}  // namespace

double SmoothStep::value(double u) {
    if (u <= kStepClamp) return 0.0;
    if (u >= 1.0 - kStepClamp) return 1.0;
    const double b = expInv(u), c = expInv(1.0 - u);
    return b / (b + c);
}

double SmoothStep::d1(double u) {
    if (u <= kStepClamp || u >= 1.0 - kStepClamp) return 0.0;
    const double v = 1.0 - u;
    const double b = expInv(u), c = expInv(v);
    const double bp = b / (u * u), cp = -c / (v * v);
    const double den = b + c;
    return (bp * c - b * cp) / (den * den);
}

double SmoothStep::d2(double u) {
    if (u <= kStepClamp || u >= 1.0 - kStepClamp) return 0.0;
    const double v = 1.0 - u;
    const double b = expInv(u), c = expInv(v);
    const double bp = b / (u * u), cp = -c / (v * v);
    const double bpp = b * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
    const double cpp = c * (1.0 / (v * v * v * v) - 2.0 / (v * v * v));
    const double den = b + c;
    const double num = bp * c - b * cp;
    return (bpp * c - b * cpp) / (den * den) -
           2.0 * num * (bp + cp) / (den * den * den);
}

CutoffWindow::CutoffWindow(double a, double b) : a_(a), b_(b) {
    if (!(b > a)) throw std::invalid_argument("CutoffWindow: need a < b");
    inv_ = 1.0 / (b - a);
}

double CutoffWindow::value(double t) const {
    return SmoothStep::value((b_ - t) * inv_);
}

double CutoffWindow::d1(double t) const {
    return -SmoothStep::d1((b_ - t) * inv_) * inv_;
}

double CutoffWindow::d2(double t) const {
    return SmoothStep::d2((b_ - t) * inv_) * inv_ * inv_;
}

MollifiedPwLinear::MollifiedPwLinear(double t0, double v0, std::vector<double> kinks,
                                     std::vector<double> slopes, double eps)
    : t0_(t0), v0_(v0), kinks_(std::move(kinks)), slopes_(std::move(slopes)), eps_(eps) {
    if (slopes_.size() != kinks_.size() + 1)
        throw std::invalid_argument("MollifiedPwLinear: need one more slope than kinks");
    for (size_t i = 0; i + 1 < kinks_.size(); ++i)
        if (!(kinks_[i] < kinks_[i + 1]))
            throw std::invalid_argument("MollifiedPwLinear: kinks must increase");
    if (!kinks_.empty() && !(t0_ <= kinks_.front()))
        throw std::invalid_argument("MollifiedPwLinear: anchor must precede kinks");
    if (eps_ < 0.0) throw std::invalid_argument("MollifiedPwLinear: eps >= 0");
    jumps_.resize(kinks_.size());
    for (size_t i = 0; i < kinks_.size(); ++i) jumps_[i] = slopes_[i + 1] - slopes_[i];
}

double MollifiedPwLinear::raw(double t) const {
    double v = v0_ + slopes_[0] * (t - t0_);
    for (size_t i = 0; i < kinks_.size(); ++i)
        if (t > kinks_[i]) v += jumps_[i] * (t - kinks_[i]);
    return v;
}

double MollifiedPwLinear::rawD1(double t) const {
    double s = slopes_[0];
    for (size_t i = 0; i < kinks_.size(); ++i)
        if (t > kinks_[i]) s += jumps_[i];
    return s;
}

double MollifiedPwLinear::value(double t) const {
    if (eps_ == 0.0) return raw(t);
    const BumpKernel& k = BumpKernel::instance();
    double v = v0_ + slopes_[0] * (t - t0_);
    for (size_t i = 0; i < kinks_.size(); ++i)
        v += jumps_[i] * eps_ * k.ramp((t - kinks_[i]) / eps_);
    return v;
}

double MollifiedPwLinear::d1(double t) const {
    if (eps_ == 0.0) return rawD1(t);
    const BumpKernel& k = BumpKernel::instance();
    double s = slopes_[0];
    for (size_t i = 0; i < kinks_.size(); ++i)
        s += jumps_[i] * k.cdf((t - kinks_[i]) / eps_);
    return s;
}

double MollifiedPwLinear::d2(double t) const {
    if (eps_ == 0.0) return 0.0;
    const BumpKernel& k = BumpKernel::instance();
    double s = 0.0;
    for (size_t i = 0; i < kinks_.size(); ++i)
        s += jumps_[i] / eps_ * k.value((t - kinks_[i]) / eps_);
    return s;
}

}  // namespace critlab
