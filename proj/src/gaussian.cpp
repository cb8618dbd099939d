#include "trinopo/gaussian.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace trinopo {

namespace {

constexpr double kSymmetryTol = 1e-12;

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        j(2 * m, 2 * m + 1) = 1.0;
        j(2 * m + 1, 2 * m) = -1.0;
    }
    return j;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(std::vector<ModeLabel> modes, Eigen::MatrixXd entries)
    : modes_(std::move(modes)), entries_(std::move(entries)) {
    const int n = static_cast<int>(modes_.size());
    if (n == 0) throw std::invalid_argument("covariance matrix needs at least one mode");
    if (entries_.rows() != 2 * n || entries_.cols() != 2 * n)
        throw std::invalid_argument("covariance entries must be 2N x 2N for N modes");
    std::set<int> ids;
    for (const auto& m : modes_) {
        if (m.wavelength_nm <= 0.0)
            throw std::invalid_argument("mode wavelength must be positive");
        if (!ids.insert(m.id).second)
            throw std::invalid_argument("duplicate mode id " + std::to_string(m.id));
    }
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if (asym > kSymmetryTol * scale)
        throw std::invalid_argument("covariance entries not symmetric (max asymmetry " +
                                    std::to_string(asym) + ")");
}

CovarianceMatrix CovarianceMatrix::vacuum(std::vector<ModeLabel> modes) {
    const int n = static_cast<int>(modes.size());
    return CovarianceMatrix(std::move(modes), Eigen::MatrixXd::Identity(2 * n, 2 * n));
}

int CovarianceMatrix::mode_index(int mode_id) const {
    for (int i = 0; i < n_modes(); ++i)
        if (modes_[i].id == mode_id) return i;
    throw std::invalid_argument("unknown mode id " + std::to_string(mode_id));
}

int CovarianceMatrix::quad_index(int mode_id, Quad q) const {
    return 2 * mode_index(mode_id) + (q == Quad::X ? 0 : 1);
}

double CovarianceMatrix::operator()(int mode_a, Quad qa, int mode_b, Quad qb) const {
    return entries_(quad_index(mode_a, qa), quad_index(mode_b, qb));
}

double qnl_of_combo(const QuadratureCombo& combo) {
    double s = 0.0;
    for (const auto& t : combo.terms) s += t.weight * t.weight;
    return s;
}

double combo_variance(const CovarianceMatrix& cov, const QuadratureCombo& combo) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * cov.n_modes());
    for (const auto& t : combo.terms) w(cov.quad_index(t.mode_id, t.quad)) += t.weight;
    return w.dot(cov.entries() * w);
}

double db_to_linear(const VarianceDb& v, const QuadratureCombo& combo) {
    return qnl_of_combo(combo) * std::pow(10.0, v.value_db / 10.0);
}

VarianceDb linear_to_db(double variance, const QuadratureCombo& combo) {
    const double qnl = qnl_of_combo(combo);
    if (variance <= 0.0 || qnl <= 0.0)
        throw std::invalid_argument("linear_to_db needs positive variance and QNL");
    return VarianceDb{10.0 * std::log10(variance / qnl), 0.0};
}

CovarianceMatrix apply_loss(const CovarianceMatrix& cov, int mode_id, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("loss transmissivity eta must lie in [0,1], got " +
                                    std::to_string(eta));
    const int i = cov.mode_index(mode_id);
    Eigen::MatrixXd m = cov.entries();
    const double r = std::sqrt(eta);
    m.row(2 * i) *= r;
    m.row(2 * i + 1) *= r;
    m.col(2 * i) *= r;
    m.col(2 * i + 1) *= r;
    m(2 * i, 2 * i) += 1.0 - eta;
    m(2 * i + 1, 2 * i + 1) += 1.0 - eta;
    return CovarianceMatrix(cov.modes(), std::move(m));
}

PhysicalityReport physicality_check(const CovarianceMatrix& cov) {
    const int n = cov.n_modes();
    Eigen::MatrixXcd h = cov.entries().cast<std::complex<double>>();
    h += std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    return PhysicalityReport{min_ev >= -1e-9, min_ev};
}

// ---- combo text form ------------------------------------------------------

QuadratureCombo QuadratureCombo::parse(const std::string& text) {
    QuadratureCombo combo;
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    size_t pos = 0;
    double sign = 1.0;
    while (pos < s.size()) {
        if (s[pos] == '+') { sign = 1.0; ++pos; continue; }
        if (s[pos] == '-') { sign = -1.0; ++pos; continue; }
        double weight = 1.0;
        size_t q = pos;
        while (q < s.size() && (std::isdigit(static_cast<unsigned char>(s[q])) ||
                                s[q] == '.' || s[q] == 'e' || s[q] == 'E'))
            ++q;
        if (q > pos && q < s.size() && s[q] == '*') {
            weight = std::stod(s.substr(pos, q - pos));
            pos = q + 1;
        }
        if (pos >= s.size() || (s[pos] != 'X' && s[pos] != 'Y' && s[pos] != 'x' && s[pos] != 'y'))
            throw std::invalid_argument("cannot parse quadrature combo '" + text + "'");
        const Quad quad = (s[pos] == 'X' || s[pos] == 'x') ? Quad::X : Quad::Y;
        ++pos;
        size_t idlen = 0;
        while (pos + idlen < s.size() && std::isdigit(static_cast<unsigned char>(s[pos + idlen])))
            ++idlen;
        if (idlen == 0)
            throw std::invalid_argument("missing mode id in combo '" + text + "'");
        const int id = std::stoi(s.substr(pos, idlen));
        pos += idlen;
        combo.terms.push_back({id, quad, sign * weight});
        sign = 1.0;
    }
    if (combo.terms.empty())
        throw std::invalid_argument("empty quadrature combo '" + text + "'");
    return combo;
}

std::string QuadratureCombo::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms) {
        double w = t.weight;
        if (!first) {
            os << (w < 0 ? "-" : "+");
            w = std::abs(w);
        } else if (w < 0) {
            os << "-";
            w = -w;
        }
        if (w != 1.0) os << w << "*";
        os << (t.quad == Quad::X ? 'X' : 'Y') << t.mode_id;
        first = false;
    }
    return os.str();
}

// ---- text serialization ---------------------------------------------------

void write_covariance(std::ostream& os, const CovarianceMatrix& cov) {
    os << "modes";
    os.precision(17);
    for (const auto& m : cov.modes()) os << ' ' << m.id << ':' << m.name << ':' << m.wavelength_nm;
    os << '\n';
    const auto& e = cov.entries();
    for (int r = 0; r < e.rows(); ++r) {
        for (int c = 0; c < e.cols(); ++c) {
            if (c) os << ' ';
            os << e(r, c);
        }
        os << '\n';
    }
}

CovarianceMatrix read_covariance(std::istream& is) {
    std::string line;
    do {
        if (!std::getline(is, line)) throw ConfigError("covariance block: missing header line");
    } while (line.empty() || line[0] == '#');
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "modes") throw ConfigError("covariance block: header must start with 'modes'");
    std::vector<ModeLabel> modes;
    std::string entry;
    while (hs >> entry) {
        const auto c1 = entry.find(':');
        const auto c2 = entry.rfind(':');
        if (c1 == std::string::npos || c2 == c1)
            throw ConfigError("covariance block: bad mode entry '" + entry + "'");
        ModeLabel m;
        m.id = std::stoi(entry.substr(0, c1));
        m.name = entry.substr(c1 + 1, c2 - c1 - 1);
        m.wavelength_nm = std::stod(entry.substr(c2 + 1));
        modes.push_back(std::move(m));
    }
    const int dim = 2 * static_cast<int>(modes.size());
    if (dim == 0) throw ConfigError("covariance block: no modes in header");
    Eigen::MatrixXd e(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (!(is >> e(r, c)))
                throw ConfigError("covariance block: expected " + std::to_string(dim * dim) +
                                  " matrix entries");
    return CovarianceMatrix(std::move(modes), std::move(e));
}

}  // namespace trinopo
