#include "oracles.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace nlsgap::oracle {

namespace {

// nodes/weights of n-point Gauss-Legendre on [-1, 1] by Newton iteration on
// the Legendre recurrence
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace

double si_gauss(double x) {
    if (x < 0.0) return -si_gauss(-x);
    if (x == 0.0) return 0.0;
    static std::vector<double> nodes, weights;
    if (nodes.empty()) gauss_legendre(20, nodes, weights);
    const int panels = std::max(1, static_cast<int>(std::ceil(x / 2.0)));
    const double len = x / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * len;
        const double mid = a + 0.5 * len;
        for (int i = 0; i < 20; ++i) {
            const double t = mid + 0.5 * len * nodes[i];
            sum += 0.5 * len * weights[i] * (std::sin(t) / t);
        }
    }
    return sum;
}

double shooting_phi0(double beta, double rmax, double step) {
    const double p = 2.0 * beta + 1.0;
    const auto rhs = [&](double r, const std::array<double, 2>& y) {
        const double u = y[0], v = y[1];
        return std::array<double, 2>{v, u - std::pow(std::abs(u), p - 1.0) * u - 2.0 / r * v};
    };
    // 'crossed': u went negative (amplitude too high); 'up': u turned around
    // while still positive (too low); 'decayed': undecided within rmax
    enum class Fate { crossed, up, decayed };
    const auto classify = [&](double b) {
        const double r0 = 1e-3;
        std::array<double, 2> y{b + (b - std::pow(b, p)) * r0 * r0 / 6.0,
                                (b - std::pow(b, p)) * r0 / 3.0};
        double r = r0;
        while (r < rmax) {
            const auto k1 = rhs(r, y);
            const auto at = [&](const std::array<double, 2>& k, double f) {
                return std::array<double, 2>{y[0] + f * k[0], y[1] + f * k[1]};
            };
            const auto k2 = rhs(r + step / 2, at(k1, step / 2));
            const auto k3 = rhs(r + step / 2, at(k2, step / 2));
            const auto k4 = rhs(r + step, at(k3, step));
            y[0] += step / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            y[1] += step / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            r += step;
            if (y[0] < 0.0) return Fate::crossed;
            if (y[1] > 0.0 && y[0] < b / 2.0) return Fate::up;
        }
        return Fate::decayed;
    };
    double lo = 4.0, hi = 5.0;
    if (classify(lo) == Fate::crossed || classify(hi) != Fate::crossed)
        throw std::runtime_error("shooting_phi0: [4, 5] does not bracket the ground state");
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (classify(mid) == Fate::crossed ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::MatrixXd dense_bs_matrix(const BSOperator& op) {
    const GridSpec& g = op.green->grid;
    const int N = g.N;
    const auto n = static_cast<Eigen::Index>(g.size());
    const std::vector<double>& w = op.green->weights.samples;
    Eigen::MatrixXd K(n, n);
    Eigen::Index row = 0;
    for (int a1 = 0; a1 < N; ++a1)
        for (int a2 = 0; a2 < N; ++a2)
            for (int a3 = 0; a3 < N; ++a3, ++row) {
                Eigen::Index col = 0;
                for (int b1 = 0; b1 < N; ++b1)
                    for (int b2 = 0; b2 < N; ++b2)
                        for (int b3 = 0; b3 < N; ++b3, ++col)
                            K(row, col) = op.scale * op.U.samples[row] *
                                          w[g.lin(g.wrap(a1 - b1), g.wrap(a2 - b2),
                                                  g.wrap(a3 - b3))] *
                                          op.U.samples[col];
            }
    return K;
}

std::vector<double> dense_top_eigs(const Eigen::MatrixXd& K, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense_top_eigs: eigendecomposition failed");
    std::vector<double> top;
    const auto n = K.rows();
    for (int i = 0; i < k && i < n; ++i) top.push_back(es.eigenvalues()(n - 1 - i));
    return top;
}

}  // namespace nlsgap::oracle
