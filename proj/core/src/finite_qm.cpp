#include "poppersim/finite_qm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace poppersim::qm {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

void check_dims(Dims dims) {
    require(dims.d1 >= 2 && dims.d2 >= 2, "both factors need dimension at least 2");
}

void check_unitary(const Matrix& u, double tol) {
    require(u.rows() == u.cols() && u.rows() > 0, "unitary must be square");
    const Matrix delta = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
    require(max_abs(delta) <= tol, "matrix is not unitary within tolerance");
}

// Observable projector applied to the second factor: rho <- (I (x) P) rho (I (x) P),
// acting blockwise on the d2 x d2 blocks of the composite matrix.
Matrix sandwich_second(const Matrix& rho, const Matrix& p, Dims dims) {
    Matrix out(rho.rows(), rho.cols());
    for (int i = 0; i < dims.d1; ++i)
        for (int j = 0; j < dims.d1; ++j)
            out.block(i * dims.d2, j * dims.d2, dims.d2, dims.d2) =
                p * rho.block(i * dims.d2, j * dims.d2, dims.d2, dims.d2) * p.adjoint();
    return out;
}

std::mt19937_64 engine_for(std::uint64_t seed) { return std::mt19937_64(seed); }

Matrix complex_gaussian(int rows, int cols, std::uint64_t seed) {
    auto eng = engine_for(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double re = normal(eng);
            const double im = normal(eng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string json_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DensityOperator DensityOperator::create(Matrix rho, Dims dims, const Tolerances& tol) {
    check_dims(dims);
    require(rho.rows() == dims.total() && rho.cols() == dims.total(),
            "matrix size must equal d1 * d2");
    require(max_abs(Matrix(rho - rho.adjoint())) <= tol.hermiticity,
            "density operator must be Hermitian");
    require(std::abs(rho.trace().real() - 1.0) <= tol.trace &&
                std::abs(rho.trace().imag()) <= tol.trace,
            "density operator must have unit trace");
    // symmetrize before the spectral check so the solver sees an exactly
    // Hermitian matrix
    Matrix sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, "eigenvalue computation failed");
    require(solver.eigenvalues().minCoeff() >= -tol.positivity,
            "density operator must be positive semidefinite");
    return DensityOperator(std::move(rho), dims);
}

Observable Observable::create(std::vector<double> eigenvalues, std::vector<Matrix> projectors,
                              const Tolerances& tol) {
    require(!projectors.empty(), "observable needs at least one outcome");
    require(eigenvalues.size() == projectors.size(),
            "eigenvalue and projector counts must match");
    const int d = static_cast<int>(projectors[0].rows());
    require(d >= 2, "observable dimension must be at least 2");
    require(static_cast<int>(projectors.size()) == d,
            "nondegenerate observable needs exactly d rank-1 projectors");
    for (size_t i = 0; i < eigenvalues.size(); ++i)
        for (size_t j = i + 1; j < eigenvalues.size(); ++j)
            require(std::abs(eigenvalues[i] - eigenvalues[j]) > tol.eigenvalue_gap,
                    "observable spectrum must be nondegenerate");
    Matrix sum = Matrix::Zero(d, d);
    for (size_t k = 0; k < projectors.size(); ++k) {
        const Matrix& p = projectors[k];
        require(p.rows() == d && p.cols() == d, "projectors must share one dimension");
        require(max_abs(Matrix(p - p.adjoint())) <= tol.projector,
                "projectors must be Hermitian");
        require(max_abs(Matrix(p * p - p)) <= tol.projector, "projectors must be idempotent");
        require(std::abs(p.trace().real() - 1.0) <= tol.projector, "projectors must be rank 1");
        for (size_t l = 0; l < k; ++l)
            require(max_abs(Matrix(p * projectors[l])) <= tol.projector,
                    "projectors must be mutually orthogonal");
        sum += p;
    }
    require(max_abs(Matrix(sum - Matrix::Identity(d, d))) <= tol.projector,
            "projectors must resolve the identity");
    return Observable(std::move(eigenvalues), std::move(projectors));
}

Matrix partial_trace_second(const DensityOperator& rho) {
    const Dims dims = rho.dims();
    Matrix out = Matrix::Zero(dims.d1, dims.d1);
    for (int i = 0; i < dims.d1; ++i)
        for (int j = 0; j < dims.d1; ++j)
            for (int k = 0; k < dims.d2; ++k)
                out(i, j) += rho.matrix()(i * dims.d2 + k, j * dims.d2 + k);
    return out;
}

DensityOperator apply_local_unitary(const DensityOperator& rho, const Matrix& u,
                                    const Tolerances& tol) {
    const Dims dims = rho.dims();
    require(u.rows() == dims.d2 && u.cols() == dims.d2,
            "local unitary must act on the second factor");
    check_unitary(u, tol.unitarity);
    Matrix out(rho.matrix().rows(), rho.matrix().cols());
    for (int i = 0; i < dims.d1; ++i)
        for (int j = 0; j < dims.d1; ++j)
            out.block(i * dims.d2, j * dims.d2, dims.d2, dims.d2) =
                u * rho.matrix().block(i * dims.d2, j * dims.d2, dims.d2, dims.d2) *
                u.adjoint();
    return DensityOperator::create(std::move(out), dims, tol);
}

std::vector<MeasurementBranch> measure_second_nonselective(const DensityOperator& rho,
                                                           const Observable& b,
                                                           const Tolerances& tol) {
    const Dims dims = rho.dims();
    require(b.dim() == dims.d2, "observable must act on the second factor");
    std::vector<MeasurementBranch> branches;
    branches.reserve(b.projectors().size());
    for (size_t k = 0; k < b.projectors().size(); ++k) {
        Matrix collapsed = sandwich_second(rho.matrix(), b.projectors()[k], dims);
        const double p = collapsed.trace().real();
        MeasurementBranch branch;
        branch.eigenvalue = b.eigenvalues()[k];
        branch.probability = std::max(p, 0.0);
        if (branch.probability >= kBranchProbabilityFloor)
            branch.state = DensityOperator::create(collapsed / p, dims, tol);
        branches.push_back(std::move(branch));
    }
    return branches;
}

std::vector<double> marginal_distribution_first(const DensityOperator& rho,
                                                const Observable& a) {
    const Dims dims = rho.dims();
    require(a.dim() == dims.d1, "observable must act on the first factor");
    const Matrix reduced = partial_trace_second(rho);
    std::vector<double> probs;
    probs.reserve(a.projectors().size());
    for (const Matrix& p : a.projectors())
        probs.push_back((p * reduced).trace().real());
    return probs;
}

std::uint64_t derive_trial_seed(std::uint64_t seed, int trial) {
    return splitmix64(seed + static_cast<std::uint64_t>(trial) * 0xD1B54A32D192ED03ULL);
}

Matrix random_unitary(int d, std::uint64_t seed) {
    require(d >= 1, "dimension must be positive");
    Matrix g = complex_gaussian(d, d, seed);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix the phase freedom so the distribution is the invariant one
    for (int k = 0; k < d; ++k) {
        Complex rkk = r(k, k);
        const double a = std::abs(rkk);
        q.col(k) *= (a > 0.0) ? rkk / a : Complex(1.0, 0.0);
    }
    return q;
}

DensityOperator random_pure_state(Dims dims, std::uint64_t seed, const Tolerances& tol) {
    check_dims(dims);
    Matrix v = complex_gaussian(dims.total(), 1, seed);
    v /= v.norm();
    return DensityOperator::create(v * v.adjoint(), dims, tol);
}

DensityOperator random_mixed_state(Dims dims, std::uint64_t seed, const Tolerances& tol) {
    check_dims(dims);
    Matrix w = complex_gaussian(dims.total(), dims.total(), seed);
    Matrix rho = w * w.adjoint();
    rho /= rho.trace().real();
    return DensityOperator::create(std::move(rho), dims, tol);
}

Observable random_observable(int d, std::uint64_t seed, const Tolerances& tol) {
    require(d >= 2, "observable dimension must be at least 2");
    const Matrix u = random_unitary(d, splitmix64(seed));
    auto eng = engine_for(splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL));
    std::uniform_real_distribution<double> jitter(0.0, 0.25);
    std::vector<double> eigenvalues;
    std::vector<Matrix> projectors;
    for (int k = 0; k < d; ++k) {
        eigenvalues.push_back(static_cast<double>(k) + jitter(eng));
        projectors.push_back(u.col(k) * u.col(k).adjoint());
    }
    return Observable::create(std::move(eigenvalues), std::move(projectors), tol);
}

AuditReport run_no_signaling_audit(int trials, Dims dims, std::uint64_t seed) {
    require(trials > 0, "audit needs at least one trial");
    check_dims(dims);
    AuditReport report;
    report.trials = trials;
    report.dims = dims;
    report.seed = seed;

    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t ts = derive_trial_seed(seed, trial);
        const DensityOperator rho = (trial % 2 == 0)
                                        ? random_pure_state(dims, splitmix64(ts ^ 1))
                                        : random_mixed_state(dims, splitmix64(ts ^ 1));
        const Matrix u = random_unitary(dims.d2, splitmix64(ts ^ 2));
        const Observable b = random_observable(dims.d2, splitmix64(ts ^ 3));
        const Observable a = random_observable(dims.d1, splitmix64(ts ^ 4));

        double deviation = 0.0;

        // identity 1: a local unitary on the second factor leaves the
        // first factor's reduced state untouched
        const Matrix before = partial_trace_second(rho);
        const Matrix after = partial_trace_second(apply_local_unitary(rho, u));
        deviation = std::max(deviation, max_abs(Matrix(after - before)));

        // identity 2: a nonselective measurement on the second factor leaves
        // both the reduced state and any first-factor distribution untouched
        Matrix collapsed = Matrix::Zero(dims.total(), dims.total());
        for (const Matrix& p : b.projectors())
            collapsed += sandwich_second(rho.matrix(), p, dims);
        const DensityOperator rho_after = DensityOperator::create(std::move(collapsed), dims);
        deviation = std::max(
            deviation, max_abs(Matrix(partial_trace_second(rho_after) - before)));
        const std::vector<double> pa = marginal_distribution_first(rho, a);
        const std::vector<double> pb = marginal_distribution_first(rho_after, a);
        for (size_t k = 0; k < pa.size(); ++k)
            deviation = std::max(deviation, std::abs(pa[k] - pb[k]));

        report.max_deviation = std::max(report.max_deviation, deviation);
        if (deviation > kAuditDeviationBound) report.failures.push_back(trial);
    }
    return report;
}

std::string audit_report_json(const AuditReport& report) {
    std::string out = "{\"trials\":" + std::to_string(report.trials);
    out += ",\"dims\":[" + std::to_string(report.dims.d1) + "," +
           std::to_string(report.dims.d2) + "]";
    out += ",\"seed\":" + std::to_string(report.seed);
    out += ",\"max_deviation\":" + json_double(report.max_deviation);
    out += ",\"failures\":[";
    for (size_t i = 0; i < report.failures.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(report.failures[i]);
    }
    out += "]}";
    return out;
}

} // namespace poppersim::qm
