// Compares the serial reference implementations against the OpenMP kernels on
// the three data-parallel workloads: Monte-Carlo partition sums, tensor
// quadrature, and verification sweeps.

#include "nambu/builtins.hpp"
#include "nambu/rng.hpp"
#include "nambu/statmech.hpp"
#include "nambu/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const std::string& name, double serial_ms, double parallel_ms) {
    std::printf("%-34s %10.1f ms %10.1f ms %7.2fx\n", name.c_str(), serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    std::printf("%-34s %13s %13s %8s\n", "workload", "serial", "parallel", "speedup");

    const auto bundle = nambu::make_builtin("quadratic-triplet");

    {
        nambu::PartitionConfig cfg;
        cfg.samples = 8'000'000;
        double zh = 0.0;
        auto run = [&](nambu::ExecutionPolicy policy) {
            cfg.policy = policy;
            zh = nambu::estimate_partition_hamiltonian(bundle.hamiltonian_system, cfg).value;
        };
        const double s = time_ms([&] { run(nambu::ExecutionPolicy::serial); });
        const double p = time_ms([&] { run(nambu::ExecutionPolicy::parallel); });
        row("monte-carlo Z_H (8e6 samples)", s, p);
        std::printf("    Z_H = %.6f\n", zh);
    }

    {
        nambu::PartitionConfig cfg;
        cfg.samples = 2'000'000;
        double zn = 0.0;
        auto run = [&](nambu::ExecutionPolicy policy) {
            cfg.policy = policy;
            zn = nambu::estimate_partition_nambu(*bundle.nambu, bundle.map,
                                                 *bundle.branches, cfg)
                     .value;
        };
        const double s = time_ms([&] { run(nambu::ExecutionPolicy::serial); });
        const double p = time_ms([&] { run(nambu::ExecutionPolicy::parallel); });
        row("monte-carlo Z_N (2e6 samples)", s, p);
        std::printf("    Z_N = %.6f\n", zn);
    }

    {
        nambu::PartitionConfig cfg;
        cfg.estimator = nambu::PartitionConfig::Estimator::tensor_quadrature;
        cfg.points_per_axis = 512;
        auto run = [&](nambu::ExecutionPolicy policy) {
            cfg.policy = policy;
            (void)nambu::estimate_partition_hamiltonian(bundle.hamiltonian_system, cfg);
        };
        const double s = time_ms([&] { run(nambu::ExecutionPolicy::serial); });
        const double p = time_ms([&] { run(nambu::ExecutionPolicy::parallel); });
        row("tensor quadrature Z_H (512^2)", s, p);
    }

    {
        const nambu::CounterRng rng{7};
        std::vector<std::vector<double>> points(40000, std::vector<double>(2));
        for (size_t i = 0; i < points.size(); ++i)
            for (int j = 0; j < 2; ++j)
                points[i][j] = rng.uniform(j, i, 0.3, 1.5);
        auto run = [&](nambu::ExecutionPolicy policy) {
            (void)nambu::verify_induced_constraints(bundle.map, bundle.nambu->constraints,
                                                    points, policy);
        };
        const double s = time_ms([&] { run(nambu::ExecutionPolicy::serial); });
        const double p = time_ms([&] { run(nambu::ExecutionPolicy::parallel); });
        row("constraint sweep (4e4 points)", s, p);
    }

    return 0;
}
