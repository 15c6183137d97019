#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dsreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/**
 * Division of the coordinates {0, ..., p-1} into d contiguous groups.
 *
 * Group j covers [offset(j), offset(j) + size(j)). Non-contiguous groupings
 * are supported by permuting the columns of X (and the entries of beta) so
 * that every group becomes a contiguous block before constructing the
 * partition.
 */
class GroupPartition
{
public:
    GroupPartition() = default;

    /// Throws InvalidInput if sizes is empty or contains a zero.
    explicit GroupPartition(std::vector<Index> sizes);

    /// d groups of equal size b.
    static GroupPartition uniform(Index d, Index b);

    /// p groups of size one.
    static GroupPartition singletons(Index p);

    Index p() const noexcept { return p_; }
    Index d() const noexcept { return static_cast<Index>(sizes_.size()); }
    Index max_size() const noexcept { return b_max_; }

    Index size(Index j) const { return sizes_[static_cast<std::size_t>(j)]; }
    Index offset(Index j) const { return offsets_[static_cast<std::size_t>(j)]; }

    /// Group containing coordinate i. Throws InvalidInput if i is out of range.
    Index group_of(Index i) const;

    const std::vector<Index>& sizes() const noexcept { return sizes_; }
    const std::vector<Index>& offsets() const noexcept { return offsets_; }

    /// Contiguous view of group j inside a length-p vector.
    template <class V>
    auto segment(V&& v, Index j) const
    {
        return std::forward<V>(v).segment(offset(j), size(j));
    }

    friend bool operator==(const GroupPartition&, const GroupPartition&) = default;

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_;
    Index p_ = 0;
    Index b_max_ = 0;
};

/// A length-p coefficient vector read through a group partition.
struct GroupedVector
{
    Vector values;
    GroupPartition partition;

    GroupedVector() = default;

    /// Throws InvalidInput when values.size() != partition.p().
    GroupedVector(Vector v, GroupPartition part);

    static GroupedVector zeros(const GroupPartition& part);

    auto group(Index j) const { return partition.segment(values, j); }
    auto group(Index j) { return partition.segment(values, j); }
};

/// Element-wise support T and group-wise support G of a vector.
struct SparsityPattern
{
    std::vector<Index> elements; // T, sorted
    std::vector<Index> groups;   // G, sorted

    Index s() const noexcept { return static_cast<Index>(elements.size()); }
    Index s_g() const noexcept { return static_cast<Index>(groups.size()); }

    /// Coordinates lying in active groups but outside T, i.e. (G) \ T.
    std::vector<Index> in_group_off_support(const GroupPartition& part) const;

    /// Coordinates in inactive groups, i.e. (G^c).
    std::vector<Index> off_group(const GroupPartition& part) const;

    /// Complement of T in {0..p-1}.
    std::vector<Index> off_support(const GroupPartition& part) const;
};

enum class NormOrder { Zero, One, Two, Inf };

/// Parses 0, 1, 2 or infinity. Anything else throws InvalidInput.
NormOrder norm_order_from(double q);

/// Plain l_q (pseudo)norm of a vector; q = 0 counts nonzeros.
double vector_norm(const Eigen::Ref<const Vector>& v, NormOrder q);

/// l_{q1,q2} norm: outer q1 over the per-group q2 norms.
double mixed_norm(const Eigen::Ref<const Vector>& v, const GroupPartition& part,
                  NormOrder q1, NormOrder q2);
double mixed_norm(const GroupedVector& v, NormOrder q1, NormOrder q2);
double mixed_norm(const GroupedVector& v, double q1, double q2);

/// Entries with |v_i| <= zero_tol count as zero (ties are zero).
SparsityPattern sparsity_of(const Eigen::Ref<const Vector>& v, const GroupPartition& part,
                            double zero_tol = 0.0);
SparsityPattern sparsity_of(const GroupedVector& v, double zero_tol = 0.0);

/// True iff v has at most s nonzeros spread over at most s_g groups.
bool is_sparse(const GroupedVector& v, Index s, Index s_g);

/// Support tolerance suggested for solver outputs.
inline constexpr double solver_zero_tol = 1e-8;

} // namespace dsreg
