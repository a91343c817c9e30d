#include "nambu/dynamics.hpp"

#include "nambu/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nambu {

namespace {

// det of `mat` (rows x cols, row-major) with column `skip` removed; rows must
// equal cols - 1.
double minor_without_column(const std::vector<double>& mat, int rows, int cols,
                            int skip) {
    std::vector<double> m(rows * (cols - 1));
    for (int r = 0; r < rows; ++r) {
        int cc = 0;
        for (int c = 0; c < cols; ++c) {
            if (c == skip) continue;
            m[r * (cols - 1) + cc++] = mat[r * cols + c];
        }
    }
    return lu_determinant(std::move(m), rows);
}

} // namespace

// =============================================================================
// Right-hand sides
// =============================================================================

std::vector<double> hamiltonian_rhs(const HamiltonianSystem& sys,
                                    std::span<const double> x) {
    if ((int)x.size() != 2 * sys.pairs)
        throw std::invalid_argument("hamiltonian_rhs: point layout mismatch");
    const auto g = gradient(sys.hamiltonian, x);
    std::vector<double> v(x.size());
    for (int k = 0; k < sys.pairs; ++k) {
        v[2 * k] = g[2 * k + 1];
        v[2 * k + 1] = -g[2 * k];
    }
    return v;
}

VelocityField hamiltonian_rhs_field(const HamiltonianSystem& sys) {
    VelocityField f;
    f.dim = 2 * sys.pairs;
    f.eval = [sys](std::span<const double> x, std::span<double> v) {
        const auto rhs = hamiltonian_rhs(sys, x);
        std::copy(rhs.begin(), rhs.end(), v.begin());
    };
    return f;
}

std::vector<double> nambu_rhs(const NambuSystem& sys, std::span<const double> x) {
    const Layout layout = sys.layout;
    if ((int)x.size() != layout.dim())
        throw std::invalid_argument("nambu_rhs: point layout mismatch");
    const int N = layout.arity, n = layout.subsystems, dim = layout.dim();

    std::vector<ScalarField> hams;
    hams.reserve(N - 1);
    hams.push_back(sys.effective_hamiltonian());
    for (const auto& g : sys.constraints) hams.push_back(g);

    // Gradients of the N-1 Hamiltonians, full dimension.
    std::vector<std::vector<double>> grads;
    grads.reserve(hams.size());
    for (const auto& h : hams) grads.push_back(gradient(h, x));

    std::vector<double> v(dim, 0.0);
    std::vector<double> block((N - 1) * N);
    for (int k = 0; k < n; ++k) {
        for (int r = 0; r < N - 1; ++r)
            for (int c = 0; c < N; ++c) block[r * N + c] = grads[r][k * N + c];
        for (int i = 0; i < N; ++i) {
            const double minor = minor_without_column(block, N - 1, N, i);
            v[k * N + i] = (i % 2 == 0 ? 1.0 : -1.0) * minor;
        }
    }
    return v;
}

VelocityField nambu_rhs_field(const NambuSystem& sys) {
    VelocityField f;
    f.dim = sys.layout.dim();
    f.eval = [sys](std::span<const double> x, std::span<double> v) {
        const auto rhs = nambu_rhs(sys, x);
        std::copy(rhs.begin(), rhs.end(), v.begin());
    };
    return f;
}

std::vector<double> generalized_nambu_rhs(const GeneralizedNambuSystem& sys,
                                          std::span<const double> w) {
    if ((int)w.size() != sys.dim)
        throw std::invalid_argument("generalized_nambu_rhs: point dimension mismatch");
    const auto gH = gradient(sys.hamiltonian, w);

    std::vector<double> v(sys.dim, 0.0);
    for (const auto& block : sys.blocks) {
        const int nx = block.x_count(), m = block.z_count();
        const auto g = block_metric(block, w);

        std::vector<std::vector<double>> gG;
        gG.reserve(m);
        for (const auto& c : block.constraints) gG.push_back(gradient(c, w));

        // Column order (x_a, x_b, z_1..z_m); rows (H, G_1..G_m).
        const int rows = m + 1, cols = m + 2;
        std::vector<double> k(rows * cols);
        std::vector<int> col_index(cols);
        for (int a = 0; a < nx; ++a) {
            for (int b = a + 1; b < nx; ++b) {
                const double gab = g[a * nx + b];
                if (gab == 0.0) continue;
                col_index[0] = block.x_indices[a];
                col_index[1] = block.x_indices[b];
                for (int s = 0; s < m; ++s) col_index[2 + s] = block.z_indices[s];
                for (int c = 0; c < cols; ++c) {
                    k[c] = gH[col_index[c]];
                    for (int s = 0; s < m; ++s) k[(1 + s) * cols + c] = gG[s][col_index[c]];
                }
                for (int c = 0; c < cols; ++c) {
                    const double minor = minor_without_column(k, rows, cols, c);
                    const double sign = (c % 2 == 0) ? 1.0 : -1.0;
                    v[col_index[c]] += 2.0 * gab * sign * minor;
                }
            }
        }
    }
    return v;
}

VelocityField generalized_nambu_rhs_field(const GeneralizedNambuSystem& sys) {
    VelocityField f;
    f.dim = sys.dim;
    f.eval = [sys](std::span<const double> w, std::span<double> v) {
        const auto rhs = generalized_nambu_rhs(sys, w);
        std::copy(rhs.begin(), rhs.end(), v.begin());
    };
    return f;
}

std::vector<double> least_action_rhs(const VariableMap& map, const ScalarField& H,
                                     std::span<const double> x) {
    if (map.image_dim != 3 || map.chart.dim() != 2)
        throw std::invalid_argument("least_action_rhs: triplet over one doublet required");
    if (!map.has_inverse())
        throw std::runtime_error("least_action_rhs: inverse hint required");
    const auto chart_pt = map.inverse_hint(x);

    const auto gx = gradient(map.components[0], chart_pt);
    const auto gy = gradient(map.components[1], chart_pt);
    const auto gz = gradient(map.components[2], chart_pt);
    const double jxy = gx[0] * gy[1] - gx[1] * gy[0];
    const double jyz = gy[0] * gz[1] - gy[1] * gz[0];
    const double jzx = gz[0] * gx[1] - gz[1] * gx[0];
    if (jxy == 0.0 && jyz == 0.0 && jzx == 0.0)
        throw std::runtime_error("fully degenerate chart");

    const auto gH = gradient(H, x);
    return {gH[1] * jxy - gH[2] * jzx, gH[2] * jyz - gH[0] * jxy,
            gH[0] * jzx - gH[1] * jyz};
}

VelocityField least_action_rhs_field(const VariableMap& map, const ScalarField& H) {
    VelocityField f;
    f.dim = 3;
    f.eval = [map, H](std::span<const double> x, std::span<double> v) {
        const auto rhs = least_action_rhs(map, H, x);
        std::copy(rhs.begin(), rhs.end(), v.begin());
    };
    return f;
}

// =============================================================================
// Integration
// =============================================================================

namespace {

void rhs_jacobian(const VelocityField& rhs, std::span<const double> x,
                  std::vector<double>& jac) {
    const int d = rhs.dim;
    jac.resize(d * d);
    if (rhs.jacobian) {
        rhs.jacobian(x, jac);
        return;
    }
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> fp(d), fm(d);
    for (int j = 0; j < d; ++j) {
        const double h = fd_default_scale() * std::max(1.0, std::abs(x[j]));
        const double xj = probe[j];
        probe[j] = xj + h;
        rhs.eval(probe, fp);
        probe[j] = xj - h;
        rhs.eval(probe, fm);
        probe[j] = xj;
        for (int i = 0; i < d; ++i) jac[i * d + j] = (fp[i] - fm[i]) / (2.0 * h);
    }
}

// RHS of the augmented system (x, M) when variational, plain x otherwise.
struct Stepper {
    const VelocityField& rhs;
    bool variational;
    int d;
    mutable std::vector<double> jac;

    int dim() const { return variational ? d + d * d : d; }

    void operator()(std::span<const double> y, std::span<double> dy) const {
        rhs.eval(y.first(d), dy.first(d));
        if (!variational) return;
        rhs_jacobian(rhs, y.first(d), jac);
        // dM = J M, M stored row-major after the state.
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double acc = 0.0;
                for (int k = 0; k < d; ++k) acc += jac[i * d + k] * y[d + k * d + j];
                dy[d + i * d + j] = acc;
            }
    }
};

bool all_finite(std::span<const double> v) {
    for (const double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

std::vector<Observable> nambu_observables(const NambuSystem& sys) {
    std::vector<Observable> obs;
    for (size_t b = 0; b < sys.constraints.size(); ++b)
        obs.push_back({"G" + std::to_string(b + 1), sys.constraints[b]});
    obs.push_back({"H", sys.hamiltonian});
    return obs;
}

Trajectory integrate(const VelocityField& rhs, std::span<const double> start,
                     const IntegratorConfig& cfg,
                     std::span<const Observable> observables) {
    if (cfg.dt <= 0.0 || cfg.steps <= 0 || !std::isfinite(cfg.dt * (double)cfg.steps))
        throw std::invalid_argument("integrate: invalid configuration");
    if ((int)start.size() != rhs.dim)
        throw std::invalid_argument("integrate: start dimension mismatch");

    const int d = rhs.dim;
    Stepper stepper{rhs, cfg.variational, d, {}};
    const int ydim = stepper.dim();

    std::vector<double> y(ydim, 0.0);
    std::copy(start.begin(), start.end(), y.begin());
    if (cfg.variational)
        for (int i = 0; i < d; ++i) y[d + i * d + i] = 1.0;

    Trajectory traj;
    for (const auto& o : observables) traj.diagnostic_names.push_back(o.name);
    if (cfg.variational) traj.diagnostic_names.push_back("detM");

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.emplace_back(y.begin(), y.begin() + d);
        std::vector<double> diag;
        diag.reserve(traj.diagnostic_names.size());
        for (const auto& o : observables)
            diag.push_back(o.field.eval(std::span<const double>(y).first(d)));
        if (cfg.variational) {
            std::vector<double> m(y.begin() + d, y.end());
            diag.push_back(lu_determinant(std::move(m), d));
        }
        traj.diagnostics.push_back(std::move(diag));
    };

    record(0.0);

    std::vector<double> k1(ydim), k2(ydim), k3(ydim), k4(ydim), tmp(ydim);
    for (long s = 0; s < cfg.steps; ++s) {
        const double h = cfg.dt;
        if (cfg.method == IntegratorConfig::Method::explicit_euler) {
            stepper(y, k1);
            for (int i = 0; i < ydim; ++i) y[i] += h * k1[i];
        } else {
            stepper(y, k1);
            for (int i = 0; i < ydim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
            stepper(tmp, k2);
            for (int i = 0; i < ydim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
            stepper(tmp, k3);
            for (int i = 0; i < ydim; ++i) tmp[i] = y[i] + h * k3[i];
            stepper(tmp, k4);
            for (int i = 0; i < ydim; ++i)
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!all_finite(y)) {
            traj.truncated = true;
            traj.error = "non-finite state at step " + std::to_string(s + 1);
            break;
        }
        record((s + 1) * cfg.dt);
    }
    return traj;
}

double flow_volume_jacobian(const VelocityField& rhs, std::span<const double> start,
                            double t, IntegratorConfig cfg) {
    if (!cfg.variational)
        throw std::invalid_argument("flow_volume_jacobian: variational config required");
    if (t <= 0.0) throw std::invalid_argument("flow_volume_jacobian: t must be positive");
    cfg.steps = std::max(1L, std::lround(t / cfg.dt));
    cfg.dt = t / (double)cfg.steps;
    const Trajectory traj = integrate(rhs, start, cfg);
    if (traj.truncated) throw std::runtime_error("flow_volume_jacobian: " + traj.error);
    return traj.diagnostics.back().back();
}

// =============================================================================
// CSV
// =============================================================================

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const int d = traj.states.empty() ? 0 : (int)traj.states.front().size();
    out << "t";
    for (int i = 0; i < d; ++i) out << ",c" << i;
    for (const auto& name : traj.diagnostic_names) out << "," << name;
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (size_t s = 0; s < traj.times.size(); ++s) {
        put(traj.times[s]);
        for (const double v : traj.states[s]) {
            out << ",";
            put(v);
        }
        for (const double v : traj.diagnostics[s]) {
            out << ",";
            put(v);
        }
        out << "\n";
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path);

    Trajectory traj;
    int coord_count = 0;
    {
        std::stringstream header(line);
        std::string token;
        std::vector<std::string> names;
        while (std::getline(header, token, ',')) names.push_back(token);
        if (names.empty() || names.front() != "t")
            throw std::runtime_error("malformed trajectory header: " + path);
        size_t i = 1;
        while (i < names.size() && names[i].size() > 1 && names[i][0] == 'c' &&
               std::isdigit((unsigned char)names[i][1])) {
            ++coord_count;
            ++i;
        }
        for (; i < names.size(); ++i) traj.diagnostic_names.push_back(names[i]);
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string token;
        std::vector<double> values;
        while (std::getline(row, token, ',')) values.push_back(std::strtod(token.c_str(), nullptr));
        const size_t expected = 1 + coord_count + traj.diagnostic_names.size();
        if (values.size() != expected)
            throw std::runtime_error("malformed trajectory row: " + path);
        traj.times.push_back(values[0]);
        traj.states.emplace_back(values.begin() + 1, values.begin() + 1 + coord_count);
        traj.diagnostics.emplace_back(values.begin() + 1 + coord_count, values.end());
    }
    return traj;
}

} // namespace nambu
