#include "trinopo/criteria.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace trinopo {

namespace {

constexpr double kBoundary = 4.0;
// a state is counted as violating only when it is below the boundary by more
// than floating-point noise, so exact-boundary states stay separable
constexpr double kBoundaryGuard = 1e-9;

CriteriaResult finish(CriteriaResult r) {
    const auto d = r.deltas();
    int n_violated = 0;
    for (int i = 0; i < 3; ++i) {
        r.violated[i] = d[i] < kBoundary - kBoundaryGuard;
        if (r.violated[i]) ++n_violated;
    }
    r.verdict = n_violated >= 2 ? Verdict::Entangled : Verdict::NotDemonstrated;
    if (n_violated == 1)
        r.note = "one inequality violated; two simultaneous violations are required";
    return r;
}

double var(const CovarianceMatrix& cov, int a, Quad q) {
    return cov(a, q, a, q);
}

double cov2(const CovarianceMatrix& cov, int a, int b, Quad q) {
    return cov(a, q, b, q);
}

}  // namespace

CriteriaResult evaluate(const CovarianceMatrix& cov, const std::array<double, 3>& gains) {
    const auto [g1, g2, g3] = gains;
    CriteriaResult r;
    r.g1 = g1;
    r.g2 = g2;
    r.g3 = g3;
    r.delta1 = combo_variance(cov, {{3, Quad::X, 1.0}, {4, Quad::X, -1.0}}) +
               combo_variance(cov, {{2, Quad::Y, g1}, {3, Quad::Y, 1.0}, {4, Quad::Y, 1.0}});
    r.delta2 = combo_variance(cov, {{2, Quad::X, 1.0}, {4, Quad::X, -1.0}}) +
               combo_variance(cov, {{2, Quad::Y, 1.0}, {3, Quad::Y, g2}, {4, Quad::Y, 1.0}});
    r.delta3 = combo_variance(cov, {{2, Quad::X, 1.0}, {3, Quad::X, -1.0}}) +
               combo_variance(cov, {{2, Quad::Y, 1.0}, {3, Quad::Y, 1.0}, {4, Quad::Y, g3}});
    return finish(r);
}

std::array<double, 3> optimal_gains(const CovarianceMatrix& cov) {
    const double v2 = var(cov, 2, Quad::Y);
    const double v3 = var(cov, 3, Quad::Y);
    const double v4 = var(cov, 4, Quad::Y);
    if (v2 <= 0.0 || v3 <= 0.0 || v4 <= 0.0)
        throw std::invalid_argument("optimal_gains: degenerate input, zero phase variance");
    const double c23 = cov2(cov, 2, 3, Quad::Y);
    const double c24 = cov2(cov, 2, 4, Quad::Y);
    const double c34 = cov2(cov, 3, 4, Quad::Y);
    return {-(c23 + c24) / v2, -(c23 + c34) / v3, -(c24 + c34) / v4};
}

CriteriaResult evaluate_at_optimal_gains(const CovarianceMatrix& cov) {
    return evaluate(cov, optimal_gains(cov));
}

// ---- measured-dB path ------------------------------------------------------

const std::array<const char*, 6>& MeasuredDbTable::row_names() {
    static const std::array<const char*, 6> names = {
        "X3-X4", "g1*Y2+Y3+Y4", "X2-X4", "Y2+g2*Y3+Y4", "X2-X3", "Y2+Y3+g3*Y4"};
    return names;
}

QuadratureCombo MeasuredDbTable::combo(int row) const {
    switch (row) {
        case 0: return {{3, Quad::X, 1.0}, {4, Quad::X, -1.0}};
        case 1: return {{2, Quad::Y, gains[0]}, {3, Quad::Y, 1.0}, {4, Quad::Y, 1.0}};
        case 2: return {{2, Quad::X, 1.0}, {4, Quad::X, -1.0}};
        case 3: return {{2, Quad::Y, 1.0}, {3, Quad::Y, gains[1]}, {4, Quad::Y, 1.0}};
        case 4: return {{2, Quad::X, 1.0}, {3, Quad::X, -1.0}};
        case 5: return {{2, Quad::Y, 1.0}, {3, Quad::Y, 1.0}, {4, Quad::Y, gains[2]}};
        default: throw std::invalid_argument("measured table row out of range");
    }
}

CriteriaResult criteria_from_measurements(const MeasuredDbTable& t) {
    CriteriaResult r;
    r.g1 = t.gains[0];
    r.g2 = t.gains[1];
    r.g3 = t.gains[2];

    std::array<double, 6> lin{};
    for (int i = 0; i < 6; ++i) lin[i] = db_to_linear(t.values[i], t.combo(i));

    r.delta1 = lin[0] + lin[1];
    r.delta2 = lin[2] + lin[3];
    r.delta3 = lin[4] + lin[5];

    // d(lin)/d(db) = lin * ln(10)/10; d(lin)/d(g) = 2 g 10^(db/10).
    const double k = std::log(10.0) / 10.0;
    constexpr double gain_sigma = 0.02;
    for (int i = 0; i < 3; ++i) {
        const double sa = lin[2 * i] * k * t.values[2 * i].uncertainty_db;
        const double sb = lin[2 * i + 1] * k * t.values[2 * i + 1].uncertainty_db;
        const double ratio = std::pow(10.0, t.values[2 * i + 1].value_db / 10.0);
        const double sg = 2.0 * t.gains[i] * ratio * gain_sigma;
        r.delta_sigma[i] = std::sqrt(sa * sa + sb * sb + sg * sg);
    }
    return finish(r);
}

MeasuredDbTable MeasuredDbTable::from_csv(std::istream& is) {
    MeasuredDbTable t;
    std::string line;
    int row = 0;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string quantity, db, unc, gain;
        std::getline(ls, quantity, ',');
        std::getline(ls, db, ',');
        std::getline(ls, unc, ',');
        std::getline(ls, gain);
        if (quantity == "quantity") continue;  // header
        if (row >= 6)
            throw ConfigError("measurement CSV: more than six data rows (line " +
                              std::to_string(lineno) + ")");
        try {
            t.values[row].value_db = std::stod(db);
            t.values[row].uncertainty_db = unc.empty() ? 0.0 : std::stod(unc);
        } catch (const std::exception&) {
            throw ConfigError("measurement CSV: bad number on line " + std::to_string(lineno));
        }
        if (t.values[row].uncertainty_db < 0.0)
            throw ConfigError("measurement CSV: negative uncertainty on line " +
                              std::to_string(lineno));
        if (row % 2 == 1) {
            if (gain.empty())
                throw ConfigError("measurement CSV: missing gain on phase row, line " +
                                  std::to_string(lineno));
            t.gains[row / 2] = std::stod(gain);
        }
        ++row;
    }
    if (row != 6)
        throw ConfigError("measurement CSV: expected six data rows, got " + std::to_string(row));
    return t;
}

void MeasuredDbTable::to_csv(std::ostream& os) const {
    os << "quantity,db,uncertainty_db,gain\n";
    for (int i = 0; i < 6; ++i) {
        os << row_names()[i] << ',' << values[i].value_db << ',' << values[i].uncertainty_db << ',';
        if (i % 2 == 1) os << gains[i / 2];
        os << '\n';
    }
}

void write_criteria_csv(std::ostream& os, const CriteriaResult& r) {
    os.precision(12);
    os << "quantity,value,uncertainty\n";
    const auto d = r.deltas();
    for (int i = 0; i < 3; ++i)
        os << "delta" << i + 1 << ',' << d[i] << ',' << r.delta_sigma[i] << '\n';
    os << "g1," << r.g1 << ",\n";
    os << "g2," << r.g2 << ",\n";
    os << "g3," << r.g3 << ",\n";
    os << "verdict," << (r.verdict == Verdict::Entangled ? "entangled" : "not-demonstrated")
       << ",\n";
}

void write_criteria_report(std::ostream& os, const CriteriaResult& r) {
    const auto d = r.deltas();
    const std::array<double, 3> g = {r.g1, r.g2, r.g3};
    os.precision(6);
    for (int i = 0; i < 3; ++i) {
        os << "Delta_" << i + 1 << " = " << d[i];
        if (r.delta_sigma[i] > 0.0) os << " +- " << r.delta_sigma[i];
        os << "  (g" << i + 1 << " = " << g[i] << ", " << (r.violated[i] ? "violated" : "not violated")
           << ")\n";
    }
    os << "verdict: "
       << (r.verdict == Verdict::Entangled ? "entangled" : "not-demonstrated") << '\n';
    if (!r.note.empty()) os << "note: " << r.note << '\n';
}

}  // namespace trinopo
