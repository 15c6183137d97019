#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <dsreg/grouped.hpp>

namespace dsreg {

/// Provenance recorded alongside generated data.
struct DatasetMeta
{
    std::optional<std::uint64_t> seed;
    std::optional<double> kappa;
    std::string covariance = "unknown"; // e.g. "identity", "toeplitz(0.2)"
    bool assumption1 = false;           // Sigma verified inside [2/3, 3/2]
};

/**
 * Observations y = X beta + eps together with the group layout of beta.
 *
 * Treated as immutable once validated: every solver takes it by const
 * reference and never writes into it.
 */
struct Dataset
{
    Matrix X;
    Vector y;
    GroupPartition partition;
    std::optional<double> sigma_truth;
    std::optional<GroupedVector> beta_truth;
    std::optional<Matrix> Sigma;
    DatasetMeta meta;

    Index n() const noexcept { return X.rows(); }
    Index p() const noexcept { return X.cols(); }

    /// Checks shapes, finiteness, Sigma symmetry and (when flagged) the
    /// eigenvalue band. Throws InvalidInput on the first violation.
    void validate() const;
};

/// Builds and validates a dataset from its required parts.
Dataset make_dataset(Matrix X, Vector y, GroupPartition partition);

/// Lower and upper eigenvalue bounds imposed on Sigma by the design assumption.
inline constexpr double sigma_eig_lower = 2.0 / 3.0;
inline constexpr double sigma_eig_upper = 1.5;

/**
 * Writes `<dir>/<stem>.json` plus `<stem>_X.csv`, `<stem>_y.csv` and, when
 * present, `<stem>_Sigma.csv`. Numbers are written with 17 significant
 * digits so a load reproduces the doubles exactly. Returns the JSON path.
 */
std::filesystem::path save_dataset(const Dataset& data, const std::filesystem::path& dir,
                                   const std::string& stem);

/// Reads a dataset written by save_dataset. CSV paths are resolved relative
/// to the JSON sidecar.
Dataset load_dataset(const std::filesystem::path& json_path);

/// Numeric CSV helpers (no header row).
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_csv_matrix(const std::filesystem::path& path);

} // namespace dsreg
