#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Finite-dimensional bipartite quantum states and the operations needed to
// check locality statements exactly: partial traces, local unitaries,
// nonselective projective measurements on one factor, and a randomized
// audit that the second factor's dynamics never move the first factor's
// statistics.

namespace poppersim::qm {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct Dims {
    int d1 = 2; // first factor
    int d2 = 2; // second factor
    int total() const { return d1 * d2; }
};

struct Tolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double positivity = 1e-10;
    double projector = 1e-10;
    double unitarity = 1e-10;
    double eigenvalue_gap = 1e-10; // spectra closer than this count as degenerate
};

// Density operator on C^{d1} (x) C^{d2}, validated Hermitian, unit trace,
// positive semidefinite within Tolerances. Index convention: row/column
// index i encodes the pair (i / d2, i % d2).
class DensityOperator {
public:
    static DensityOperator create(Matrix rho, Dims dims, const Tolerances& tol = {});

    const Matrix& matrix() const { return rho_; }
    const Dims& dims() const { return dims_; }

private:
    DensityOperator(Matrix rho, Dims dims) : rho_(std::move(rho)), dims_(dims) {}
    Matrix rho_;
    Dims dims_;
};

// Nondegenerate observable on one factor: distinct real eigenvalues paired
// with rank-1 orthogonal projectors that resolve the identity. Degenerate
// spectra are rejected at construction.
class Observable {
public:
    static Observable create(std::vector<double> eigenvalues,
                             std::vector<Matrix> projectors,
                             const Tolerances& tol = {});

    int dim() const { return static_cast<int>(projectors_.empty() ? 0 : projectors_[0].rows()); }
    int outcomes() const { return static_cast<int>(eigenvalues_.size()); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    const std::vector<Matrix>& projectors() const { return projectors_; }

private:
    Observable(std::vector<double> ev, std::vector<Matrix> pr)
        : eigenvalues_(std::move(ev)), projectors_(std::move(pr)) {}
    std::vector<double> eigenvalues_;
    std::vector<Matrix> projectors_;
};

// Trace over the second factor; returns a d1 x d1 matrix.
Matrix partial_trace_second(const DensityOperator& rho);

// (I (x) u) rho (I (x) u)^dagger. Rejects non-unitary u.
DensityOperator apply_local_unitary(const DensityOperator& rho, const Matrix& u,
                                    const Tolerances& tol = {});

// One branch of a nonselective measurement on the second factor. Outcomes
// with probability below the floor carry no state.
struct MeasurementBranch {
    double eigenvalue = 0.0;
    double probability = 0.0;
    std::optional<DensityOperator> state; // empty when probability < floor
};

inline constexpr double kBranchProbabilityFloor = 1e-14;

std::vector<MeasurementBranch> measure_second_nonselective(const DensityOperator& rho,
                                                           const Observable& b,
                                                           const Tolerances& tol = {});

// Outcome distribution of an observable on the first factor.
std::vector<double> marginal_distribution_first(const DensityOperator& rho,
                                                const Observable& a);

struct AuditReport {
    int trials = 0;
    Dims dims;
    std::uint64_t seed = 0;
    double max_deviation = 0.0;
    std::vector<int> failures; // trial indices exceeding the deviation bound
};

inline constexpr double kAuditDeviationBound = 1e-12;

// Randomized check of the two locality identities: reduced-state invariance
// under I (x) u, and recovery of the first factor's outcome distribution
// after a nonselective measurement on the second factor. Trials alternate
// random pure states and rank-k mixtures; unitaries and observable bases are
// Haar-style draws from orthonormalized complex Gaussian matrices. Every
// intermediate is revalidated; violations are recorded per trial.
AuditReport run_no_signaling_audit(int trials, Dims dims, std::uint64_t seed);

// JSON encoding of the report: {trials, dims, seed, max_deviation, failures}.
std::string audit_report_json(const AuditReport& report);

// Deterministic per-trial generator seeds derived from the audit seed.
std::uint64_t derive_trial_seed(std::uint64_t seed, int trial);

// Random-object draws used by the audit, exposed for tests.
Matrix random_unitary(int d, std::uint64_t seed);
DensityOperator random_pure_state(Dims dims, std::uint64_t seed, const Tolerances& tol = {});
DensityOperator random_mixed_state(Dims dims, std::uint64_t seed, const Tolerances& tol = {});
Observable random_observable(int d, std::uint64_t seed, const Tolerances& tol = {});

} // namespace poppersim::qm
