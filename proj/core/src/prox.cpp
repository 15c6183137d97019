#include <dsreg/prox.hpp>

#include <cmath>

#include <dsreg/error.hpp>

namespace dsreg {

namespace {

void require_threshold(double alpha, const char* who)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw InvalidInput(std::string(who) + ": threshold must be finite and >= 0");
    }
}

inline double shrink(double x, double alpha)
{
    const double mag = std::abs(x) - alpha;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

} // namespace

void ProxSpec::validate() const
{
    require_threshold(lambda_elem, "ProxSpec.lambda_elem");
    require_threshold(lambda_group, "ProxSpec.lambda_group");
}

double soft_threshold(double x, double alpha)
{
    require_threshold(alpha, "soft_threshold");
    return shrink(x, alpha);
}

Vector soft_threshold(const Eigen::Ref<const Vector>& x, double alpha)
{
    require_threshold(alpha, "soft_threshold");
    return x.unaryExpr([alpha](double v) { return shrink(v, alpha); });
}

Vector group_soft_threshold(const Eigen::Ref<const Vector>& v, double alpha)
{
    require_threshold(alpha, "group_soft_threshold");
    const double nrm = v.norm();
    if (nrm <= alpha) return Vector::Zero(v.size());
    return (1.0 - alpha / nrm) * v;
}

void sparse_group_prox_inplace(Eigen::Ref<Vector> v, const GroupPartition& part,
                               const ProxSpec& spec)
{
    const double a = spec.lambda_elem;
    const double g = spec.lambda_group;
    for (Index j = 0; j < part.d(); ++j) {
        auto seg = part.segment(v, j);
        if (a > 0.0) {
            for (Index k = 0; k < seg.size(); ++k) seg[k] = shrink(seg[k], a);
        }
        if (g > 0.0) {
            const double nrm = seg.norm();
            if (nrm <= g) {
                seg.setZero();
            } else {
                seg *= 1.0 - g / nrm;
            }
        }
    }
}

GroupedVector sparse_group_prox(const GroupedVector& v, const ProxSpec& spec)
{
    spec.validate();
    GroupedVector out = v;
    sparse_group_prox_inplace(out.values, out.partition, spec);
    return out;
}

double sparse_group_penalty(const Eigen::Ref<const Vector>& v, const GroupPartition& part,
                            double lambda, double lambda_g)
{
    double group_sum = 0.0;
    if (lambda_g != 0.0) {
        for (Index j = 0; j < part.d(); ++j) group_sum += part.segment(v, j).norm();
    }
    return lambda * v.lpNorm<1>() + lambda_g * group_sum;
}

} // namespace dsreg
