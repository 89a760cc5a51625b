#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace muxillum {

/// N x M matrix of per-illuminant drive levels in [0,1]; column j is the
/// illumination state of acquisition j.
class IlluminationMatrix {
public:
    IlluminationMatrix(Eigen::MatrixXd weights, bool binary);

    static IlluminationMatrix identity(int n);
    static IlluminationMatrix all_on(int n);

    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    int num_illuminants() const noexcept { return static_cast<int>(weights_.rows()); }
    int num_acquisitions() const noexcept { return static_cast<int>(weights_.cols()); }
    bool binary() const noexcept { return binary_; }

    /// First m columns.
    IlluminationMatrix prefix(int m) const;
    /// This matrix with one extra column appended.
    IlluminationMatrix with_column(const Eigen::VectorXd& column) const;

    friend bool operator==(const IlluminationMatrix& a, const IlluminationMatrix& b);

private:
    Eigen::MatrixXd weights_;
    bool binary_;
};

/// CSV: header `# N=<n> M=<m> binary=<0|1>`, then one row per illuminant with
/// one value per acquisition, 6 decimal places.
std::string matrix_to_csv(const IlluminationMatrix& w);
IlluminationMatrix matrix_from_csv(const std::string& text, const std::string& source = "<matrix>");
void save_matrix_csv(const IlluminationMatrix& w, const std::filesystem::path& path);
IlluminationMatrix load_matrix_csv(const std::filesystem::path& path);

}  // namespace muxillum
