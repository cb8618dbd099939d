#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "trinopo/errors.hpp"

namespace trinopo {

// One optical mode in a covariance matrix. Ids must be unique within a matrix.
struct ModeLabel {
    int id = 0;
    double wavelength_nm = 0.0;
    std::string name;
};

enum class Quad { X, Y };

struct ComboTerm {
    int mode_id = 0;
    Quad quad = Quad::X;
    double weight = 0.0;
};

// Weighted sum of quadratures, e.g. X3 - X4 or 0.95*Y2 + Y3 + Y4.
struct QuadratureCombo {
    std::vector<ComboTerm> terms;

    QuadratureCombo() = default;
    QuadratureCombo(std::initializer_list<ComboTerm> t) : terms(t) {}

    // Parses strings like "X3-X4" or "0.95*Y2+Y3+Y4".
    static QuadratureCombo parse(const std::string& text);
    std::string str() const;
};

// Variance in decibels relative to the quantum noise limit of its combo.
struct VarianceDb {
    double value_db = 0.0;
    double uncertainty_db = 0.0;
};

// Symmetric matrix of quadrature second moments in ordering (X1, Y1, X2, Y2, ...),
// dimensionless with vacuum variance 1 per quadrature.
class CovarianceMatrix {
  public:
    CovarianceMatrix(std::vector<ModeLabel> modes, Eigen::MatrixXd entries);

    static CovarianceMatrix vacuum(std::vector<ModeLabel> modes);

    const std::vector<ModeLabel>& modes() const { return modes_; }
    const Eigen::MatrixXd& entries() const { return entries_; }
    int n_modes() const { return static_cast<int>(modes_.size()); }

    // Row/column of a quadrature; throws std::invalid_argument for unknown ids.
    int mode_index(int mode_id) const;
    int quad_index(int mode_id, Quad q) const;

    double operator()(int mode_a, Quad qa, int mode_b, Quad qb) const;

  private:
    std::vector<ModeLabel> modes_;
    Eigen::MatrixXd entries_;
};

// Sum of squared combo weights: the vacuum variance of the combination.
double qnl_of_combo(const QuadratureCombo& combo);

// w' V w for the combo's weight vector. Throws for unknown mode ids.
double combo_variance(const CovarianceMatrix& cov, const QuadratureCombo& combo);

// dB below/above the combo QNL -> absolute variance, and its inverse.
double db_to_linear(const VarianceDb& v, const QuadratureCombo& combo);
VarianceDb linear_to_db(double variance, const QuadratureCombo& combo);

// Pure-loss channel of transmissivity eta applied to one mode.
CovarianceMatrix apply_loss(const CovarianceMatrix& cov, int mode_id, double eta);

struct PhysicalityReport {
    bool physical = false;
    double min_eigenvalue = 0.0;
};

// Uncertainty-principle test: V + iJ must have no eigenvalue below -1e-9,
// where J is block diagonal with [[0,1],[-1,0]] per mode so that vacuum is
// exactly marginal (min eigenvalue 0).
PhysicalityReport physicality_check(const CovarianceMatrix& cov);

// Plain-text block: one header line "modes id:name:wavelength_nm ...", then
// the 2N x 2N entries row by row, whitespace separated, full precision.
void write_covariance(std::ostream& os, const CovarianceMatrix& cov);
CovarianceMatrix read_covariance(std::istream& is);

}  // namespace trinopo
