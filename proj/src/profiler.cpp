#include "mgprof/profiler.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "mgprof/errors.hpp"

namespace mgp {

PopulationProfile population_profile(std::vector<HeatTraceProfile> profiles, const std::string& label) {
    if (profiles.empty()) throw DataError("profiler", "no profiles for population " + label);
    const Timescales& ts = profiles.front().timescales;
    const std::size_t len = ts.values.size();
    for (const auto& p : profiles) {
        if (p.timescales != ts || p.values.size() != len) {
            throw DataError("profiler", "timescale mismatch in population " + label + " (" +
                                            p.subject_id + ")");
        }
    }
    PopulationProfile out;
    out.state_label = label;
    out.timescales = ts;
    out.mean_values.assign(len, 0.0);
    for (const auto& p : profiles)
        for (std::size_t j = 0; j < len; ++j) out.mean_values[j] += p.values[j];
    for (double& v : out.mean_values) v /= static_cast<double>(profiles.size());
    out.per_subject = std::move(profiles);
    return out;
}

std::size_t resolve_tail_index(std::optional<int> tail_index, std::size_t length) {
    if (length == 0) throw DataError("profiler", "empty profile");
    const long long len = static_cast<long long>(length);
    long long idx = tail_index.value_or(-1);
    if (idx < 0) idx += len;
    if (idx < 0 || idx >= len) throw ConfigError("profiler", "tail index out of range");
    return static_cast<std::size_t>(idx);
}

MarginReport state_margin(const PopulationProfile& p1, const PopulationProfile& p2, double alpha,
                          std::optional<int> tail_index) {
    if (p1.timescales != p2.timescales) throw DataError("profiler", "timescale mismatch");
    const std::size_t idx = resolve_tail_index(tail_index, p1.mean_values.size());
    MarginReport r;
    r.alpha = alpha;
    r.tail_s1 = p1.mean_values[idx];
    r.tail_s2 = p2.mean_values[idx];
    r.delta = std::abs(r.tail_s1 - r.tail_s2);
    return r;
}

std::vector<double> polyfit(std::span<const double> xs, std::span<const double> ys, int degree) {
    if (degree < 0) throw ConfigError("profiler", "degree must be >= 0");
    if (xs.size() != ys.size()) throw ConfigError("profiler", "xs and ys differ in length");
    const auto cols = static_cast<Eigen::Index>(degree) + 1;
    if (static_cast<Eigen::Index>(xs.size()) < cols) {
        throw ConfigError("profiler", "underdetermined fit: " + std::to_string(xs.size()) +
                                          " points for degree " + std::to_string(degree));
    }
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("profiler", "duplicate x values");
    }

    const auto rows = static_cast<Eigen::Index>(xs.size());
    Matrix v(rows, cols);
    Vector y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double p = 1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            v(i, j) = p;
            p *= xs[i];
        }
        y[i] = ys[i];
    }
    Vector scale = v.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < cols; ++j)
        if (scale[j] == 0.0) scale[j] = 1.0;
    const Matrix scaled = v * scale.cwiseInverse().asDiagonal();
    const Vector c = scaled.colPivHouseholderQr().solve(y).cwiseQuotient(scale);
    return {c.data(), c.data() + c.size()};
}

double polyval(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

}  // namespace mgp
