#include "nambu/statmech.hpp"

#include "nambu/fields.hpp"
#include "nambu/quadrature.hpp"
#include "nambu/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nambu {

namespace {

std::vector<std::pair<double, double>> chart_bounds(int dim, const PartitionConfig& cfg) {
    if (!cfg.bounds.empty()) {
        if ((int)cfg.bounds.size() != dim)
            throw std::invalid_argument("partition: bounds count vs chart dimension");
        return cfg.bounds;
    }
    return std::vector<std::pair<double, double>>(dim, {-cfg.radius, cfg.radius});
}

double box_volume(std::span<const std::pair<double, double>> bounds) {
    double v = 1.0;
    for (const auto& [lo, hi] : bounds) v *= hi - lo;
    return v;
}

// Monte-carlo estimate of integral f over the box: two deterministic passes
// (sum and sum of squares) through the pairwise reducer.
PartitionEstimate monte_carlo(std::span<const std::pair<double, double>> bounds,
                              const PartitionConfig& cfg,
                              const std::function<double(std::span<const double>)>& f) {
    const int d = (int)bounds.size();
    const CounterRng rng{cfg.seed};
    auto sample_term = [&](std::int64_t i, auto&& g) {
        static thread_local std::vector<double> u;
        u.resize(d);
        for (int j = 0; j < d; ++j)
            u[j] = rng.uniform((std::uint64_t)j, (std::uint64_t)i, bounds[j].first,
                               bounds[j].second);
        return g(f(u));
    };
    const double n = (double)cfg.samples;
    const double sum = indexed_sum(
        cfg.samples, [&](std::int64_t i) { return sample_term(i, [](double v) { return v; }); },
        cfg.policy);
    const double sum_sq = indexed_sum(
        cfg.samples,
        [&](std::int64_t i) { return sample_term(i, [](double v) { return v * v; }); },
        cfg.policy);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double volume = box_volume(bounds);

    PartitionEstimate est;
    est.value = volume * mean;
    est.stderr_ = volume * std::sqrt(var / n);
    est.method = "monte-carlo";
    return est;
}

PartitionEstimate quadrature(std::span<const std::pair<double, double>> bounds,
                             const PartitionConfig& cfg,
                             const std::function<double(std::span<const double>)>& f) {
    const int fine = std::max(4, cfg.points_per_axis);
    const int coarse = fine / 2;
    const double vc = tensor_quadrature(bounds, coarse, f, cfg.policy);
    const double vf = tensor_quadrature(bounds, fine, f, cfg.policy);
    PartitionEstimate est;
    est.value = vf;
    est.stderr_ = std::abs(vf - vc);
    est.method = "tensor-quadrature";
    return est;
}

PartitionEstimate estimate_over_chart(int chart_dim, const PartitionConfig& cfg,
                                      const std::function<double(std::span<const double>)>& f) {
    if (cfg.beta <= 0.0) throw std::invalid_argument("partition: beta must be positive");
    if (cfg.estimator == PartitionConfig::Estimator::monte_carlo && cfg.samples < 1000)
        throw std::invalid_argument("partition: monte-carlo needs >= 1000 samples");
    const auto bounds = chart_bounds(chart_dim, cfg);
    PartitionEstimate est = cfg.estimator == PartitionConfig::Estimator::monte_carlo
                                ? monte_carlo(bounds, cfg, f)
                                : quadrature(bounds, cfg, f);
    est.beta = cfg.beta;
    est.seed = cfg.seed;
    est.tail_bound = cfg.bounds.empty() ? std::exp(-0.5 * cfg.beta * cfg.radius * cfg.radius)
                                        : 0.0;
    return est;
}

} // namespace

PartitionEstimate estimate_partition_hamiltonian(const HamiltonianSystem& sys,
                                                 const PartitionConfig& cfg) {
    const double beta = cfg.beta;
    const ScalarField H = sys.hamiltonian;
    auto f = [H, beta](std::span<const double> u) {
        const double h = H.eval(u);
        const double v = std::exp(-beta * h);
        if (!std::isfinite(v)) throw std::runtime_error("integrand overflow");
        return v;
    };
    return estimate_over_chart(2 * sys.pairs, cfg, f);
}

namespace {

struct NambuIntegrand {
    const NambuSystem* nsys;
    const VariableMap* map;
    const BranchSolver* branches;
    double beta;
    double cutoff;

    // Complement of the solved indices: the (x, y)-block whose chart Jacobian
    // carries the change of variables of the branch-resolved delta integral.
    std::vector<int> free_indices;

    explicit NambuIntegrand(const NambuSystem& n, const VariableMap& m,
                            const BranchSolver& b, const PartitionConfig& cfg)
        : nsys(&n), map(&m), branches(&b), beta(cfg.beta), cutoff(cfg.weight_cutoff) {
        for (int i = 0; i < m.image_dim; ++i)
            if (std::find(b.solved_indices.begin(), b.solved_indices.end(), i) ==
                b.solved_indices.end())
                free_indices.push_back(i);
        if ((int)free_indices.size() != m.chart.dim())
            throw std::invalid_argument(
                "estimate_partition_nambu: free multiplet block must match chart size");
        if ((int)b.solved_indices.size() != (int)n.constraints.size())
            throw std::invalid_argument(
                "estimate_partition_nambu: one solved coordinate per constraint");
    }

    // value of the branch sum at a chart point; `excluded` selects the
    // excluded-mass indicator instead.
    double operator()(std::span<const double> u, bool excluded_pass,
                      bool count_pass) const {
        const int cd = map->chart.dim();
        const int m = (int)branches->solved_indices.size();
        const int wd = map->image_dim;

        static thread_local std::vector<double> scratch;
        scratch.resize(cd * cd + wd + m * m + wd);
        const std::span<double> jac(scratch.data(), cd * cd);
        const std::span<double> w(scratch.data() + cd * cd, wd);
        const std::span<double> jz(scratch.data() + cd * cd + wd, m * m);
        const std::span<double> grad(scratch.data() + cd * cd + wd + m * m, wd);

        // Area element |d(free block)/d(chart)|.
        for (int r = 0; r < cd; ++r) {
            gradient_into(map->components[free_indices[r]], u, grad.first(cd));
            for (int c = 0; c < cd; ++c) jac[r * cd + c] = grad[c];
        }
        const double area = std::abs(lu_determinant(jac, cd));

        for (int i = 0; i < wd; ++i) w[i] = map->components[i].eval(u);
        double total = 0.0;
        for (const auto& branch : branches->branches) {
            branch(w); // rewrites exactly the solved slots
            // |det d(G_1..G_{N-2}) / d(z-block)| at the branch point.
            for (int s = 0; s < m; ++s) {
                gradient_into(nsys->constraints[s], w, grad);
                for (int t = 0; t < m; ++t) jz[s * m + t] = grad[branches->solved_indices[t]];
            }
            const double den = m > 0 ? std::abs(lu_determinant(jz, m)) : 1.0;
            const double boltz = std::exp(-beta * nsys->hamiltonian.eval(w));
            if (!std::isfinite(boltz)) throw std::runtime_error("integrand overflow");
            if (den < cutoff) {
                // Excluded band: bound its mass by the Boltzmann factor (the
                // weight ratio is 1 where the induced-constraint conditions
                // hold).
                if (excluded_pass) total += boltz;
                if (count_pass) total += 1.0;
                continue;
            }
            if (!excluded_pass && !count_pass) total += area / den * boltz;
        }
        return total;
    }
};

} // namespace

PartitionEstimate estimate_partition_nambu(const NambuSystem& nsys,
                                           const VariableMap& map,
                                           const BranchSolver& branches,
                                           const PartitionConfig& cfg) {
    const NambuIntegrand integrand(nsys, map, branches, cfg);
    auto value_fn = [&](std::span<const double> u) { return integrand(u, false, false); };
    PartitionEstimate est = estimate_over_chart(map.chart.dim(), cfg, value_fn);
    est.branch_count = branches.branch_count();

    // Deterministic excluded-band diagnostics.
    auto excl_fn = [&](std::span<const double> u) { return integrand(u, true, false); };
    auto count_fn = [&](std::span<const double> u) { return integrand(u, false, true); };
    PartitionConfig diag_cfg = cfg;
    diag_cfg.points_per_axis = std::max(4, cfg.points_per_axis);
    const PartitionEstimate excl = estimate_over_chart(map.chart.dim(), diag_cfg, excl_fn);
    est.excluded_mass_bound = excl.value;
    if (cfg.estimator == PartitionConfig::Estimator::monte_carlo) {
        const CounterRng rng{cfg.seed};
        const auto bounds = chart_bounds(map.chart.dim(), cfg);
        const int d = (int)bounds.size();
        est.excluded_count = (std::int64_t)indexed_sum(
            cfg.samples,
            [&](std::int64_t i) {
                std::vector<double> u(d);
                for (int j = 0; j < d; ++j)
                    u[j] = rng.uniform((std::uint64_t)j, (std::uint64_t)i, bounds[j].first,
                                       bounds[j].second);
                return count_fn(u);
            },
            cfg.policy);
    }
    return est;
}

NormalizationResult normalization_factor(const NambuSystem& nsys,
                                         const VariableMap& map,
                                         const BranchSolver& branches,
                                         const HamiltonianSystem& sys,
                                         const PartitionConfig& cfg) {
    NormalizationResult out;
    out.nambu = estimate_partition_nambu(nsys, map, branches, cfg);
    out.hamiltonian = estimate_partition_hamiltonian(sys, cfg);
    out.predicted_branches = branches.branch_count();

    const double zh = out.hamiltonian.value;
    if (zh == 0.0 || std::abs(zh) <= 3.0 * out.hamiltonian.stderr_)
        throw std::runtime_error("degenerate denominator");
    out.ratio = out.nambu.value / zh;
    const double rel_n = out.nambu.stderr_ / std::abs(out.nambu.value);
    const double rel_h = out.hamiltonian.stderr_ / std::abs(zh);
    out.stderr_ = std::abs(out.ratio) * std::sqrt(rel_n * rel_n + rel_h * rel_h);
    return out;
}

std::string partition_report_json(const PartitionEstimate& est) {
    nlohmann::ordered_json j;
    j["value"] = est.value;
    j["stderr"] = est.stderr_;
    j["method"] = est.method;
    j["beta"] = est.beta;
    j["seed"] = est.seed;
    j["excluded_mass_bound"] = est.excluded_mass_bound;
    j["branch_count"] = est.branch_count;
    j["tail_bound"] = est.tail_bound;
    j["excluded_count"] = est.excluded_count;
    return j.dump(2);
}

} // namespace nambu
