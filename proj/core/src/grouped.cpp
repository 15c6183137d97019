#include <dsreg/grouped.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <dsreg/error.hpp>

namespace dsreg {

GroupPartition::GroupPartition(std::vector<Index> sizes)
    : sizes_(std::move(sizes))
{
    if (sizes_.empty()) {
        throw InvalidInput("GroupPartition: at least one group is required");
    }
    offsets_.reserve(sizes_.size());
    for (Index b : sizes_) {
        if (b < 1) {
            throw InvalidInput("GroupPartition: group sizes must be >= 1");
        }
        offsets_.push_back(p_);
        p_ += b;
        b_max_ = std::max(b_max_, b);
    }
}

GroupPartition GroupPartition::uniform(Index d, Index b)
{
    if (d < 1 || b < 1) {
        throw InvalidInput("GroupPartition::uniform: d and b must be >= 1");
    }
    return GroupPartition(std::vector<Index>(static_cast<std::size_t>(d), b));
}

GroupPartition GroupPartition::singletons(Index p)
{
    return uniform(p, 1);
}

Index GroupPartition::group_of(Index i) const
{
    if (i < 0 || i >= p_) {
        throw InvalidInput("GroupPartition::group_of: index " + std::to_string(i) +
                           " outside [0, " + std::to_string(p_) + ")");
    }
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
    return static_cast<Index>(it - offsets_.begin()) - 1;
}

GroupedVector::GroupedVector(Vector v, GroupPartition part)
    : values(std::move(v)), partition(std::move(part))
{
    if (values.size() != partition.p()) {
        throw InvalidInput("GroupedVector: length " + std::to_string(values.size()) +
                           " does not match partition dimension " +
                           std::to_string(partition.p()));
    }
}

GroupedVector GroupedVector::zeros(const GroupPartition& part)
{
    return GroupedVector(Vector::Zero(part.p()), part);
}

std::vector<Index> SparsityPattern::in_group_off_support(const GroupPartition& part) const
{
    std::vector<Index> out;
    for (Index j : groups) {
        for (Index i = part.offset(j); i < part.offset(j) + part.size(j); ++i) {
            if (!std::binary_search(elements.begin(), elements.end(), i)) out.push_back(i);
        }
    }
    return out;
}

std::vector<Index> SparsityPattern::off_group(const GroupPartition& part) const
{
    std::vector<Index> out;
    for (Index j = 0; j < part.d(); ++j) {
        if (std::binary_search(groups.begin(), groups.end(), j)) continue;
        for (Index i = part.offset(j); i < part.offset(j) + part.size(j); ++i) out.push_back(i);
    }
    return out;
}

std::vector<Index> SparsityPattern::off_support(const GroupPartition& part) const
{
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(part.p() - s()));
    for (Index i = 0; i < part.p(); ++i) {
        if (!std::binary_search(elements.begin(), elements.end(), i)) out.push_back(i);
    }
    return out;
}

NormOrder norm_order_from(double q)
{
    if (q == 0.0) return NormOrder::Zero;
    if (q == 1.0) return NormOrder::One;
    if (q == 2.0) return NormOrder::Two;
    if (std::isinf(q) && q > 0) return NormOrder::Inf;
    throw InvalidInput("unsupported norm order " + std::to_string(q) +
                       " (expected 0, 1, 2 or inf)");
}

double vector_norm(const Eigen::Ref<const Vector>& v, NormOrder q)
{
    switch (q) {
    case NormOrder::Zero:
        return static_cast<double>((v.array() != 0.0).count());
    case NormOrder::One:
        return v.lpNorm<1>();
    case NormOrder::Two:
        return v.norm();
    case NormOrder::Inf:
        return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double mixed_norm(const Eigen::Ref<const Vector>& v, const GroupPartition& part,
                  NormOrder q1, NormOrder q2)
{
    if (v.size() != part.p()) {
        throw InvalidInput("mixed_norm: vector length does not match partition");
    }
    Vector inner(part.d());
    for (Index j = 0; j < part.d(); ++j) {
        inner[j] = vector_norm(part.segment(v, j), q2);
    }
    return vector_norm(inner, q1);
}

double mixed_norm(const GroupedVector& v, NormOrder q1, NormOrder q2)
{
    return mixed_norm(v.values, v.partition, q1, q2);
}

double mixed_norm(const GroupedVector& v, double q1, double q2)
{
    return mixed_norm(v, norm_order_from(q1), norm_order_from(q2));
}

SparsityPattern sparsity_of(const Eigen::Ref<const Vector>& v, const GroupPartition& part,
                            double zero_tol)
{
    if (zero_tol < 0) throw InvalidInput("sparsity_of: zero_tol must be >= 0");
    if (v.size() != part.p()) {
        throw InvalidInput("sparsity_of: vector length does not match partition");
    }
    SparsityPattern out;
    for (Index j = 0; j < part.d(); ++j) {
        bool active = false;
        for (Index i = part.offset(j); i < part.offset(j) + part.size(j); ++i) {
            if (std::abs(v[i]) > zero_tol) {
                out.elements.push_back(i);
                active = true;
            }
        }
        if (active) out.groups.push_back(j);
    }
    return out;
}

SparsityPattern sparsity_of(const GroupedVector& v, double zero_tol)
{
    return sparsity_of(v.values, v.partition, zero_tol);
}

bool is_sparse(const GroupedVector& v, Index s, Index s_g)
{
    if (s < 0 || s_g < 0 || s > v.partition.p() || s_g > v.partition.d()) {
        throw InvalidInput("is_sparse: require 0 <= s <= p and 0 <= s_g <= d");
    }
    const auto pat = sparsity_of(v, 0.0);
    return pat.s() <= s && pat.s_g() <= s_g;
}

} // namespace dsreg
