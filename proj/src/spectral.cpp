#include "mgprof/spectral.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mgprof/errors.hpp"
#include "mgprof/io.hpp"

namespace mgp {

namespace {
constexpr double kClampTol = 1e-8;
}

const char* to_string(ProfileScale s) noexcept { return s == ProfileScale::Trace ? "trace" : "mean"; }

ProfileScale parse_profile_scale(const std::string& s) {
    if (s == "trace") return ProfileScale::Trace;
    if (s == "mean") return ProfileScale::Mean;
    throw ConfigError("spectral", "unknown profile scale '" + s + "'");
}

NormalizedLaplacian normalized_laplacian(const Matrix& p) {
    if (p.rows() != p.cols()) throw ConfigError("spectral", "fused matrix must be square");
    const Eigen::Index n = p.rows();
    const Vector strength = p.rowwise().sum();
    Vector inv_sqrt(n);
    NormalizedLaplacian out;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (strength[i] > 0.0) {
            inv_sqrt[i] = 1.0 / std::sqrt(strength[i]);
        } else {
            inv_sqrt[i] = 0.0;
            out.isolated_nodes.push_back(i);
        }
    }
    out.values = -(inv_sqrt.asDiagonal() * p * inv_sqrt.asDiagonal());
    for (Eigen::Index i = 0; i < n; ++i) out.values(i, i) += inv_sqrt[i] > 0.0 ? 1.0 : 0.0;
    // Guard against the product order breaking exact symmetry.
    out.values = (out.values + out.values.transpose()) * 0.5;
    return out;
}

Spectrum symmetric_spectrum(const NormalizedLaplacian& l, bool want_vectors) {
    const Matrix& a = l.values;
    if (a.rows() != a.cols()) throw ConfigError("spectral", "Laplacian must be square");
    Spectrum spec;
    if (a.rows() == 0) {
        spec.eigenvalues.resize(0);
        if (want_vectors) spec.eigenvectors = Matrix(0, 0);
        return spec;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("spectral", "symmetric eigensolver did not converge");
    }
    spec.eigenvalues = solver.eigenvalues();
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
        double& lam = spec.eigenvalues[k];
        if (lam < 0.0 && lam >= -kClampTol) lam = 0.0;
        if (lam > 2.0 && lam <= 2.0 + kClampTol) lam = 2.0;
    }
    if (want_vectors) spec.eigenvectors = solver.eigenvectors();
    return spec;
}

Timescales make_timescales(double t_min, double t_max, int n_t) {
    if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max)) {
        throw ConfigError("spectral", "timescales need 0 < t_min < t_max");
    }
    if (n_t < 2) throw ConfigError("spectral", "n_t must be >= 2");
    const double lo = std::log10(t_min);
    const double hi = std::log10(t_max);
    const double step = (hi - lo) / static_cast<double>(n_t - 1);
    Timescales ts;
    ts.values.reserve(static_cast<std::size_t>(n_t));
    for (int j = 0; j < n_t; ++j) ts.values.push_back(std::pow(10.0, lo + j * step));
    ts.values.front() = t_min;
    ts.values.back() = t_max;
    return ts;
}

double heat_trace(const Spectrum& spec, double t) {
    if (!(t >= 0.0)) throw ConfigError("spectral", "t must be >= 0");
    double h = 0.0;
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) h += std::exp(-t * spec.eigenvalues[k]);
    return h;
}

double node_heat_trace(const Spectrum& spec, double t, Eigen::Index v) {
    if (!spec.eigenvectors) throw ConfigError("spectral", "node heat trace needs eigenvectors");
    if (!(t >= 0.0)) throw ConfigError("spectral", "t must be >= 0");
    const Matrix& phi = *spec.eigenvectors;
    if (v < 0 || v >= phi.rows()) throw ConfigError("spectral", "node index out of range");
    double h = 0.0;
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
        h += std::exp(-t * spec.eigenvalues[k]) * phi(v, k) * phi(v, k);
    }
    return h;
}

HeatTraceProfile profile_subject(const FusedGraph& fused, const Timescales& ts, ProfileScale scale) {
    const Spectrum spec = symmetric_spectrum(normalized_laplacian(fused.weights));
    const double factor =
        scale == ProfileScale::Mean && fused.weights.rows() > 0 ? 1.0 / fused.weights.rows() : 1.0;
    HeatTraceProfile profile;
    profile.subject_id = fused.subject_id;
    profile.timescales = ts;
    profile.values.reserve(ts.values.size());
    for (double t : ts.values) profile.values.push_back(factor * heat_trace(spec, t));
    return profile;
}

void write_profiles_csv(const std::vector<HeatTraceProfile>& profiles,
                        const std::filesystem::path& path) {
    std::string out = "subject_id,t,h\n";
    for (const auto& p : profiles) {
        for (std::size_t j = 0; j < p.values.size(); ++j) {
            out += p.subject_id + ',' + io::format_double(p.timescales.values[j]) + ',' +
                   io::format_double(p.values[j]) + '\n';
        }
    }
    io::write_text(path, out);
}

std::vector<HeatTraceProfile> read_profiles_csv(const std::filesystem::path& path) {
    std::istringstream in(io::read_text(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("subject_id,t,h", 0) != 0) {
        throw LoadError(LoadErrorKind::ParseError, path.string() + ": expected header subject_id,t,h");
    }
    std::vector<HeatTraceProfile> profiles;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw LoadError(LoadErrorKind::ParseError, path.string() + ":" + std::to_string(line_no));
        }
        const std::string id = line.substr(0, c1);
        double t = 0.0, h = 0.0;
        try {
            t = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            h = std::stod(line.substr(c2 + 1));
        } catch (const std::exception&) {
            throw LoadError(LoadErrorKind::ParseError, path.string() + ":" + std::to_string(line_no));
        }
        if (profiles.empty() || profiles.back().subject_id != id) {
            profiles.push_back({id, {}, {}});
        }
        profiles.back().timescales.values.push_back(t);
        profiles.back().values.push_back(h);
    }
    return profiles;
}

}  // namespace mgp
