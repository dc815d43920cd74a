#include "mgprof/centrality.hpp"

#include <cmath>

#include "mgprof/errors.hpp"

namespace mgp {

namespace {
constexpr double kFloorRatio = 1e-8;
}

const char* to_string(CentralityKind kind) noexcept {
    return kind == CentralityKind::Eigen ? "eigen" : "strength";
}

CentralityKind parse_centrality_kind(const std::string& s) {
    if (s == "eigen") return CentralityKind::Eigen;
    if (s == "strength") return CentralityKind::Strength;
    throw ConfigError("centrality", "unknown centrality kind '" + s + "'");
}

int floor_values(Vector& values) {
    if (values.size() == 0) return 0;
    const double floor = kFloorRatio * values.maxCoeff();
    int count = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] < floor) {
            values[i] = floor;
            ++count;
        }
    }
    return count;
}

CentralityDiag eigencentrality(const ConnectivityMatrix& w, const PowerIterationOptions& opt) {
    const Matrix& a = w.weights;
    const Eigen::Index n = a.rows();
    const double max_row_sum = n > 0 ? a.rowwise().sum().maxCoeff() : 0.0;
    if (n == 0 || !(max_row_sum > 0.0)) {
        throw DataError("centrality", "all-zero matrix has no positive spectral radius");
    }
    const double shift = 0.5 * max_row_sum;

    Vector x = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Vector next(n);
    double change = 0.0;
    double prev_change = 0.0;
    double rate = 0.0;
    int it = 0;
    bool converged = false;
    while (it < opt.max_iterations) {
        ++it;
        next.noalias() = a * x;
        next += shift * x;
        const double norm = next.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw NumericalError("centrality", "power iteration collapsed");
        }
        next /= norm;
        change = (next - x).lpNorm<Eigen::Infinity>();
        if (prev_change > 0.0) rate = change / prev_change;
        prev_change = change;
        x.swap(next);
        if (change <= opt.tolerance) {
            converged = true;
            break;
        }
    }
    // A stalled rate means a (near-)degenerate top eigenvalue; any vector in
    // that eigenspace is accepted and flagged as slow.
    if (!converged && rate <= 0.99) {
        throw NumericalError("centrality", "power iteration did not converge in " +
                                              std::to_string(opt.max_iterations) +
                                              " iterations (last change " + std::to_string(change) +
                                              ")");
    }
    if (x.sum() < 0.0) x = -x;

    CentralityDiag out;
    out.kind = CentralityKind::Eigen;
    out.spectral_radius = x.dot(a * x);
    out.iterations = it;
    out.slow_convergence = rate > 0.99;
    // Exact zeros can come out slightly negative through rounding.
    out.values = x.cwiseMax(0.0);
    out.floored_count = floor_values(out.values);
    return out;
}

CentralityDiag strength_centrality(const ConnectivityMatrix& w) {
    Vector s = w.weights.rowwise().sum();
    const double norm = s.norm();
    if (!(norm > 0.0)) throw DataError("centrality", "all-zero matrix has no strength");
    CentralityDiag out;
    out.kind = CentralityKind::Strength;
    out.values = s / norm;
    out.floored_count = floor_values(out.values);
    return out;
}

CentralityDiag compute_centrality(const ConnectivityMatrix& w, CentralityKind kind) {
    return kind == CentralityKind::Eigen ? eigencentrality(w) : strength_centrality(w);
}

}  // namespace mgp
