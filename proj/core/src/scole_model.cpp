#include "nldecay/scole_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <stdexcept>

namespace nldecay {

namespace {

// 4-point Gauss-Legendre on [-1, 1]; exact through degree 7, enough for the
// Hermite mass products (degree 6).
constexpr std::array<double, 4> kGaussX = {-0.8611363115940526, -0.3399810435848563,
                                           0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussW = {0.3478548451374538, 0.6521451548625461,
                                           0.6521451548625461, 0.3478548451374538};

// Cubic Hermite shape functions on [0, 1] and their second derivatives,
// slope DOFs scaled by the element length h.
void hermite(double xi, double h, std::array<double, 4>& val,
             std::array<double, 4>& dd) {
    val = {1 - 3 * xi * xi + 2 * xi * xi * xi, h * (xi - 2 * xi * xi + xi * xi * xi),
           3 * xi * xi - 2 * xi * xi * xi, h * (-xi * xi + xi * xi * xi)};
    dd = {(-6 + 12 * xi) / (h * h), (-4 + 6 * xi) / h, (6 - 12 * xi) / (h * h),
          (-2 + 6 * xi) / h};
}

}  // namespace

DampedSystem build_scole_fem(const ScoleConfig& config) {
    if (config.elements < 4)
        throw std::invalid_argument("build_scole_fem: elements must be >= 4");
    if (config.m <= 0 || config.J <= 0)
        throw std::invalid_argument("build_scole_fem: tip mass and inertia must be positive");

    const int ne = config.elements;
    const double h = 1.0 / ne;
    const int n_dof_full = 2 * (ne + 1);

    Eigen::MatrixXd K_full = Eigen::MatrixXd::Zero(n_dof_full, n_dof_full);
    Eigen::MatrixXd M_full = Eigen::MatrixXd::Zero(n_dof_full, n_dof_full);

    for (int e = 0; e < ne; ++e) {
        const double xa = e * h;
        Eigen::Matrix4d Ke = Eigen::Matrix4d::Zero();
        Eigen::Matrix4d Me = Eigen::Matrix4d::Zero();
        for (int q = 0; q < 4; ++q) {
            const double xi = 0.5 * (kGaussX[q] + 1.0);
            const double x = xa + xi * h;
            const double wq = 0.5 * h * kGaussW[q];
            const double ei = config.EI(x);
            const double rho = config.rho(x);
            if (!(ei > 0.0) || !(rho > 0.0))
                throw std::invalid_argument(
                    "build_scole_fem: EI and rho must be positive on the grid");
            std::array<double, 4> val, dd;
            hermite(xi, h, val, dd);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    Ke(i, j) += wq * ei * dd[i] * dd[j];
                    Me(i, j) += wq * rho * val[i] * val[j];
                }
        }
        const int base = 2 * e;
        K_full.block<4, 4>(base, base) += Ke;
        M_full.block<4, 4>(base, base) += Me;
    }

    // tip rigid body: mass on the end deflection DOF, inertia on the slope DOF
    M_full(n_dof_full - 2, n_dof_full - 2) += config.m;
    M_full(n_dof_full - 1, n_dof_full - 1) += config.J;

    // clamp u(0) = u'(0) = 0
    const int n = n_dof_full - 2;
    Eigen::MatrixXd K = K_full.bottomRightCorner(n, n);
    Eigen::MatrixXd M = M_full.bottomRightCorner(n, n);

    Eigen::LLT<Eigen::MatrixXd> lltK(K);
    if (lltK.info() != Eigen::Success)
        throw std::runtime_error("build_scole_fem: singular stiffness after clamping");
    Eigen::LLT<Eigen::MatrixXd> lltM(M);
    if (lltM.info() != Eigen::Success)
        throw std::runtime_error("build_scole_fem: energy matrix not SPD");

    const Eigen::MatrixXd LK = lltK.matrixL();
    const Eigen::MatrixXd LM = lltM.matrixL();

    // Energy coordinates x = (p, q) with p = LK^T u, q = LM^T u'. Then
    // A = [[0, G], [-G^T, 0]] with G = LK^T LM^{-T}, exactly skew.
    Eigen::MatrixXd G = LM.triangularView<Eigen::Lower>()
                            .transpose()
                            .solve<Eigen::OnTheRight>(LK.transpose());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);

    DampedSystem sys;
    sys.dim = 2 * n;
    sys.input_dim = 2;
    sys.modal = false;
    sys.label = "scole-fem(elements=" + std::to_string(ne) + ")";

    sys.generator = Eigen::MatrixXd::Zero(sys.dim, sys.dim);
    sys.generator.topRightCorner(n, n) = G;
    sys.generator.bottomLeftCorner(n, n) = -G.transpose();

    // damping channel reads the tip velocities: w = (u_t(1), u_xt(1))
    Eigen::MatrixXd selectors = Eigen::MatrixXd::Zero(n, 2);
    selectors(n - 2, 0) = 1.0;
    selectors(n - 1, 1) = 1.0;
    const Eigen::MatrixXd Bq = LM.triangularView<Eigen::Lower>().solve(selectors);
    sys.input_map = Eigen::MatrixXd::Zero(sys.dim, 2);
    sys.input_map.bottomRows(n) = Bq;

    // rotation pairs (u_k, v_k) with frequency sigma_k, ordered ascending
    sys.freqs.resize(n);
    sys.pair_basis = Eigen::MatrixXd::Zero(sys.dim, sys.dim);
    for (int k = 0; k < n; ++k) {
        const int src = n - 1 - k;  // SVD returns descending singular values
        sys.freqs(k) = svd.singularValues()(src);
        sys.pair_basis.col(2 * k).head(n) = svd.matrixU().col(src);
        sys.pair_basis.col(2 * k + 1).tail(n) = svd.matrixV().col(src);
    }
    sys.input_map_pairs = sys.pair_basis.transpose() * sys.input_map;
    sys.eigen_data = eigen_data_from_pairs(sys.freqs, sys.pair_basis, sys.input_map);
    return sys;
}

MultiplierReport check_multiplier_condition(const ScoleConfig& scole,
                                            const MultiplierConfig& mult) {
    if (mult.grid_points < 101)
        throw std::invalid_argument("check_multiplier_condition: grid_points must be >= 101");
    if (std::abs(mult.zeta(0.0)) > 1e-12)
        throw std::invalid_argument("check_multiplier_condition: zeta(0) must be 0");
    if (mult.a <= 0 || mult.b <= 0)
        throw std::invalid_argument("check_multiplier_condition: a and b must be positive");

    const int n = mult.grid_points;
    const double dx = 1.0 / (n - 1);
    auto rho_zeta = [&](double x) { return scole.rho(x) * mult.zeta(x); };
    auto ei_zeta = [&](double x) { return scole.EI(x) * mult.zeta(x); };
    auto deriv = [&](const std::function<double(double)>& f, double x) {
        // central differences inside, one-sided at the ends
        if (x < 0.5 * dx) return (f(x + dx) - f(x)) / dx;
        if (x > 1.0 - 0.5 * dx) return (f(x) - f(x - dx)) / dx;
        return (f(x + dx) - f(x - dx)) / (2.0 * dx);
    };

    MultiplierReport report{-1e300, -1e300, false};
    for (int i = 0; i < n; ++i) {
        const double x = i * dx;
        const double e1 = 2.0 * (1.0 - mult.a) * scole.rho(x) - deriv(rho_zeta, x) + mult.b;
        const double e2 = scole.EI(x) * (1.0 - mult.a - 2.0 * deriv(mult.zeta, x)) +
                          0.5 * deriv(ei_zeta, x) + mult.b;
        report.max_density_expr = std::max(report.max_density_expr, e1);
        report.max_rigidity_expr = std::max(report.max_rigidity_expr, e2);
    }
    report.pass = report.max_density_expr < 0.0 && report.max_rigidity_expr < 0.0;
    return report;
}

}  // namespace nldecay
