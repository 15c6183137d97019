#include <dsreg/dataset.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <dsreg/error.hpp>

namespace dsreg {

using nlohmann::json;

void Dataset::validate() const
{
    if (X.cols() != partition.p()) {
        throw InvalidInput("Dataset: X has " + std::to_string(X.cols()) +
                           " columns but the partition covers " +
                           std::to_string(partition.p()));
    }
    if (y.size() != X.rows()) {
        throw InvalidInput("Dataset: y length does not match the number of rows of X");
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw InvalidInput("Dataset: X and y must be finite");
    }
    if (beta_truth && beta_truth->values.size() != partition.p()) {
        throw InvalidInput("Dataset: beta_truth has the wrong length");
    }
    if (sigma_truth && !(*sigma_truth >= 0)) {
        throw InvalidInput("Dataset: sigma_truth must be >= 0");
    }
    if (Sigma) {
        if (Sigma->rows() != partition.p() || Sigma->cols() != partition.p()) {
            throw InvalidInput("Dataset: Sigma must be p x p");
        }
        if ((*Sigma - Sigma->transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw InvalidInput("Dataset: Sigma is not symmetric");
        }
        if (meta.assumption1) {
            // Diagonal covariances (the common simulation case) skip the
            // O(p^3) eigensolve.
            double lo = 0.0;
            double hi = 0.0;
            if (Sigma->isDiagonal(0.0)) {
                lo = Sigma->diagonal().minCoeff();
                hi = Sigma->diagonal().maxCoeff();
            } else {
                Eigen::SelfAdjointEigenSolver<Matrix> es(*Sigma, Eigen::EigenvaluesOnly);
                lo = es.eigenvalues().minCoeff();
                hi = es.eigenvalues().maxCoeff();
            }
            constexpr double tol = 1e-10;
            if (lo < sigma_eig_lower - tol || hi > sigma_eig_upper + tol) {
                throw InvalidInput("Dataset: Sigma eigenvalues [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "] leave [2/3, 3/2]");
            }
        }
    }
}

Dataset make_dataset(Matrix X, Vector y, GroupPartition partition)
{
    Dataset d;
    d.X = std::move(X);
    d.y = std::move(y);
    d.partition = std::move(partition);
    d.validate();
    return d;
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m)
{
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
    char buf[32];
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

Matrix read_csv_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw InvalidInput("non-numeric cell '" + cell + "' in " + path.string());
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InvalidInput("ragged CSV rows in " + path.string());
        }
        rows.push_back(std::move(row));
    }
    const Index nr = static_cast<Index>(rows.size());
    const Index nc = nr ? static_cast<Index>(rows.front().size()) : 0;
    Matrix m(nr, nc);
    for (Index r = 0; r < nr; ++r)
        for (Index c = 0; c < nc; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

std::filesystem::path save_dataset(const Dataset& data, const std::filesystem::path& dir,
                                   const std::string& stem)
{
    data.validate();
    std::filesystem::create_directories(dir);
    const std::string x_name = stem + "_X.csv";
    const std::string y_name = stem + "_y.csv";
    write_csv_matrix(dir / x_name, data.X);
    write_csv_matrix(dir / y_name, data.y);

    json j;
    j["format"] = "dsreg-dataset";
    j["version"] = 1;
    j["n"] = data.n();
    j["p"] = data.p();
    j["partition_sizes"] = data.partition.sizes();
    j["x_csv"] = x_name;
    j["y_csv"] = y_name;
    j["seed"] = data.meta.seed ? json(*data.meta.seed) : json(nullptr);
    j["sigma"] = data.sigma_truth ? json(*data.sigma_truth) : json(nullptr);
    j["kappa"] = data.meta.kappa ? json(*data.meta.kappa) : json(nullptr);
    j["covariance"] = data.meta.covariance;
    j["assumption1"] = data.meta.assumption1;
    if (data.beta_truth) {
        const auto& b = data.beta_truth->values;
        j["beta_truth"] = std::vector<double>(b.data(), b.data() + b.size());
    } else {
        j["beta_truth"] = nullptr;
    }
    if (data.Sigma) {
        const std::string s_name = stem + "_Sigma.csv";
        write_csv_matrix(dir / s_name, *data.Sigma);
        j["sigma_matrix_csv"] = s_name;
    } else {
        j["sigma_matrix_csv"] = nullptr;
    }

    const auto json_path = dir / (stem + ".json");
    std::ofstream out(json_path);
    out << j.dump(2) << '\n';
    return json_path;
}

Dataset load_dataset(const std::filesystem::path& json_path)
{
    std::ifstream in(json_path);
    if (!in) throw InvalidInput("cannot open " + json_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("malformed dataset sidecar " + json_path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "dsreg-dataset") {
        throw InvalidInput(json_path.string() + " is not a dsreg dataset sidecar");
    }
    const auto base = json_path.parent_path();
    Dataset d;
    try {
        d.partition = GroupPartition(j.at("partition_sizes").get<std::vector<Index>>());
        d.X = read_csv_matrix(base / j.at("x_csv").get<std::string>());
        const Matrix ycol = read_csv_matrix(base / j.at("y_csv").get<std::string>());
        if (ycol.cols() != 1) throw InvalidInput("y CSV must have a single column");
        d.y = ycol.col(0);
        if (!j.at("seed").is_null()) d.meta.seed = j["seed"].get<std::uint64_t>();
        if (!j.at("sigma").is_null()) d.sigma_truth = j["sigma"].get<double>();
        if (j.contains("kappa") && !j["kappa"].is_null()) d.meta.kappa = j["kappa"].get<double>();
        d.meta.covariance = j.value("covariance", "unknown");
        d.meta.assumption1 = j.value("assumption1", false);
        if (!j.at("beta_truth").is_null()) {
            const auto b = j["beta_truth"].get<std::vector<double>>();
            d.beta_truth = GroupedVector(Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size())),
                                         d.partition);
        }
        if (j.contains("sigma_matrix_csv") && !j["sigma_matrix_csv"].is_null()) {
            d.Sigma = read_csv_matrix(base / j["sigma_matrix_csv"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw InvalidInput("dataset sidecar " + json_path.string() + ": " + e.what());
    }
    d.validate();
    return d;
}

} // namespace dsreg
