#pragma once

#include <dsreg/grouped.hpp>

namespace dsreg {

/// Per-step thresholds for the combined l1 + l_{1,2} penalty.
struct ProxSpec
{
    double lambda_elem = 0.0;
    double lambda_group = 0.0;

    /// Throws InvalidInput when either threshold is negative or not finite.
    void validate() const;
};

/// H_alpha(x) = sgn(x) * max(|x| - alpha, 0). Throws InvalidInput if alpha < 0.
double soft_threshold(double x, double alpha);
Vector soft_threshold(const Eigen::Ref<const Vector>& x, double alpha);

/// Proximal map of alpha * ||.||_2: (1 - alpha / ||v||_2)_+ v.
Vector group_soft_threshold(const Eigen::Ref<const Vector>& v, double alpha);

/**
 * Proximal map of lambda_elem * ||.||_1 + lambda_group * ||.||_{1,2}.
 *
 * Applied group by group as element-wise shrinkage followed by block
 * shrinkage; this composition is the exact prox of the sum.
 */
GroupedVector sparse_group_prox(const GroupedVector& v, const ProxSpec& spec);

/// In-place form of sparse_group_prox over a raw vector (hot loop of the solvers).
void sparse_group_prox_inplace(Eigen::Ref<Vector> v, const GroupPartition& part,
                               const ProxSpec& spec);

/// lambda * ||v||_1 + lambda_g * ||v||_{1,2}.
double sparse_group_penalty(const Eigen::Ref<const Vector>& v, const GroupPartition& part,
                            double lambda, double lambda_g);

} // namespace dsreg
