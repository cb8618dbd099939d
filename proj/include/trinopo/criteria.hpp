#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "trinopo/gaussian.hpp"

namespace trinopo {

enum class Verdict { Entangled, NotDemonstrated };

// Result of the combined-variance inequalities over modes a2, a3, a4.
// Each Delta_i must drop below 4 to violate its inequality; two simultaneous
// violations certify tripartite entanglement.
struct CriteriaResult {
    double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    // First-order propagated uncertainties; zero unless computed from
    // measured dB values.
    std::array<double, 3> delta_sigma{0.0, 0.0, 0.0};
    std::array<bool, 3> violated{false, false, false};
    Verdict verdict = Verdict::NotDemonstrated;
    std::string note;

    std::array<double, 3> deltas() const { return {delta1, delta2, delta3}; }
};

// Delta_1 = V(X3-X4) + V(g1*Y2+Y3+Y4)
// Delta_2 = V(X2-X4) + V(Y2+g2*Y3+Y4)
// Delta_3 = V(X2-X3) + V(Y2+Y3+g3*Y4)
// Requires modes with ids 2, 3, 4 in cov.
CriteriaResult evaluate(const CovarianceMatrix& cov, const std::array<double, 3>& gains);

// Closed-form minimizers of the quadratic gain dependence of each Delta.
std::array<double, 3> optimal_gains(const CovarianceMatrix& cov);

CriteriaResult evaluate_at_optimal_gains(const CovarianceMatrix& cov);

// Six measured dB values (row order: X3-X4, g1*Y2+Y3+Y4, X2-X4, Y2+g2*Y3+Y4,
// X2-X3, Y2+Y3+g3*Y4) plus the three electronic gains.
struct MeasuredDbTable {
    std::array<VarianceDb, 6> values{};
    std::array<double, 3> gains{1.0, 1.0, 1.0};

    static const std::array<const char*, 6>& row_names();
    QuadratureCombo combo(int row) const;

    // CSV with columns quantity,db,uncertainty_db,gain (header optional;
    // gain cells may be empty on amplitude rows).
    static MeasuredDbTable from_csv(std::istream& is);
    void to_csv(std::ostream& os) const;
};

// Converts each dB entry to linear variance through its combo QNL and sums
// per inequality; uncertainties propagate to first order (dB values and gains
// treated as independent).
CriteriaResult criteria_from_measurements(const MeasuredDbTable& table);

void write_criteria_csv(std::ostream& os, const CriteriaResult& r);
void write_criteria_report(std::ostream& os, const CriteriaResult& r);

}  // namespace trinopo
