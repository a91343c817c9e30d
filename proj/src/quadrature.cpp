#include "nambu/quadrature.hpp"

#include <map>
#include <mutex>

namespace nambu {

namespace {

GaussLegendre compute_gl(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // Recompute the derivative at the converged node.
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[i] = -x;
        gl.weights[i] = w;
        gl.nodes[n - 1 - i] = x;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
    return gl;
}

} // namespace

const GaussLegendre& GaussLegendre::order(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: order must be positive");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
    return it->second;
}

double CumulativeIntegral::operator()(double t) const {
    if (t < std::min(a_, b_) - 1e-12 || t > std::max(a_, b_) + 1e-12)
        throw std::out_of_range("CumulativeIntegral: query outside grid");
    const int cells = (int)nodes_.size() - 1;
    const double h = (b_ - a_) / cells;
    int c = (int)std::floor((t - a_) / h);
    c = std::max(0, std::min(cells - 1, c));
    const double x0 = nodes_[c], x1 = nodes_[c + 1];
    const double u = (t - x0) / (x1 - x0);
    const double u2 = u * u, u3 = u2 * u;
    // Cubic Hermite basis; slopes are exact integrand values.
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    const double dx = x1 - x0;
    return h00 * values_[c] + h10 * dx * slopes_[c] + h01 * values_[c + 1] +
           h11 * dx * slopes_[c + 1];
}

} // namespace nambu
