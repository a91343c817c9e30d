#include "nambu/conjugate.hpp"

#include "nambu/fields.hpp"
#include "nambu/quadrature.hpp"

#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace nambu {

namespace {

std::string transverse_key(std::span<const double> u, int skip) {
    std::string key((u.size() - 1) * sizeof(double), '\0');
    size_t at = 0;
    for (size_t j = 0; j < u.size(); ++j) {
        if ((int)j == skip) continue;
        std::memcpy(key.data() + at * sizeof(double), &u[j], sizeof(double));
        ++at;
    }
    return key;
}

struct TableCache {
    std::mutex mutex;
    std::unordered_map<std::string, std::shared_ptr<CumulativeIntegral>> tables;
};

} // namespace

ScalarField conjugate_coordinate(const ScalarField& integrand, QuadraturePath path) {
    if (path.coordinate < 0 || path.coordinate >= integrand.dim)
        throw std::invalid_argument("conjugate_coordinate: path coordinate out of range");
    if (path.cells < 1 || !(path.lo < path.hi))
        throw std::invalid_argument("conjugate_coordinate: bad grid");

    auto cache = std::make_shared<TableCache>();
    const ScalarField f = integrand;
    const int dim = integrand.dim;

    auto table_for = [cache, f, path](std::span<const double> u) {
        const std::string key = transverse_key(u, path.coordinate);
        std::lock_guard<std::mutex> lock(cache->mutex);
        auto it = cache->tables.find(key);
        if (it == cache->tables.end()) {
            std::vector<double> probe(u.begin(), u.end());
            auto line = [&probe, &f, &path](double s) {
                probe[path.coordinate] = s;
                return f.eval(probe);
            };
            it = cache->tables
                     .emplace(key, std::make_shared<CumulativeIntegral>(
                                       path.lo, path.hi, path.cells, line))
                     .first;
        }
        return it->second;
    };

    return make_field(dim, [table_for, path](std::span<const double> u) {
        const auto table = table_for(u);
        return (*table)(u[path.coordinate]) - (*table)(path.origin);
    });
}

std::vector<ScalarField> construct_conjugate_coordinates(
    std::span<const ScalarField> constraints, const VariableMap& map,
    std::span<const int> z_indices, std::span<const int> alphas,
    const MetricField& metric, std::span<const std::pair<int, int>> metric_entries,
    QuadraturePath base_path) {
    const int m = (int)z_indices.size();
    if ((int)constraints.size() != m)
        throw std::invalid_argument("construct_conjugate_coordinates: one constraint per z");
    if (metric && metric_entries.size() != alphas.size())
        throw std::invalid_argument("construct_conjugate_coordinates: one metric entry per alpha");

    std::vector<ScalarField> out;
    out.reserve(alphas.size());
    const std::vector<int> zs(z_indices.begin(), z_indices.end());
    const std::vector<ScalarField> cons(constraints.begin(), constraints.end());
    const int wdim = map.image_dim;

    for (size_t a = 0; a < alphas.size(); ++a) {
        const std::pair<int, int> entry = metric ? metric_entries[a] : std::pair<int, int>{0, 0};
        MetricField g = metric;
        ScalarField integrand = make_field(
            map.chart.dim(), [map, zs, cons, g, entry, wdim](std::span<const double> u) {
                const auto w = map.apply(u);
                const int m = (int)zs.size();
                std::vector<double> jz(m * m);
                for (int s = 0; s < m; ++s) {
                    const auto gs = gradient(cons[s], w);
                    for (int t = 0; t < m; ++t) jz[s * m + t] = gs[zs[t]];
                }
                const double detz = m > 0 ? lu_determinant(std::move(jz), m) : 1.0;
                double weight = 0.5;
                if (g) {
                    // Metric over the x-block; entry picks g_{alpha, partner}.
                    std::vector<double> gm((wdim - m) * (wdim - m));
                    g(w, gm);
                    weight = gm[entry.first * (wdim - m) + entry.second];
                }
                return 2.0 * weight * detz;
            });
        QuadraturePath path = base_path;
        path.coordinate = alphas[a];
        out.push_back(conjugate_coordinate(integrand, path));
    }
    return out;
}

} // namespace nambu
