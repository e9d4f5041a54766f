// fock.hpp — truncated bosonic Fock space over a finite weighted mode set:
// occupation-number basis, exponential vectors, field operators, second
// quantization, Weyl operators, and the commutator defects C_eps(f), T(f).

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace pf {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;

// ---------------------------------------------------------------- ModeSpace

// Finite set of radiation modes: strictly positive frequencies omega(k) and
// strictly positive measure weights mu(k). The weighted one-boson inner
// product is <f,h> = sum_k mu(k) conj(f_k) h_k. All Fock algebra absorbs
// sqrt(mu) into the amplitudes once, reducing everything to counting measure
// while keeping ladder matrix elements in the textbook sqrt(n) form.
class ModeSpace {
public:
    // freq_floor > 0 clamps small frequencies instead of rejecting them
    // (infrared experiments); by default omega <= 0 is an error.
    ModeSpace(Eigen::VectorXd omega, Eigen::VectorXd weight, double freq_floor = 0.0);

    static ModeSpace uniform(const Eigen::VectorXd& omega) {
        return ModeSpace(omega, Eigen::VectorXd::Ones(omega.size()));
    }

    int mode_count() const { return static_cast<int>(omega_.size()); }
    const Eigen::VectorXd& omega() const { return omega_; }
    const Eigen::VectorXd& weight() const { return weight_; }

    // weighted inner product on raw amplitudes (antilinear in the first slot)
    cplx inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h) const;
    double norm(const Eigen::VectorXcd& f) const;

    // sqrt(mu)-scaled amplitudes; the representation used by all Fock operators
    Eigen::VectorXcd absorb(const Eigen::VectorXcd& f) const;

    // || w(omega)^{1/2} f || for a scalar function w of the frequency,
    // evaluated in the weighted inner product
    double norm_omega_pow(const Eigen::VectorXcd& f, double exponent) const;

    // || (omega^{-1/2} v 1) f ||
    double norm_invroot_or_one(const Eigen::VectorXcd& f) const;

private:
    Eigen::VectorXd omega_;
    Eigen::VectorXd weight_;
};

// ---------------------------------------------------------------- FockBasis

// Occupation tuples (n_1,...,n_M) with total quanta <= max_quanta, enumerated
// in graded lexicographic order (grade = total quanta, ascending; lex inside
// each grade). Index 0 is the vacuum.
class FockBasis {
public:
    FockBasis(int mode_count, int max_quanta);

    int mode_count() const { return mode_count_; }
    int max_quanta() const { return max_quanta_; }
    int dim() const { return static_cast<int>(states_.size()); }

    const std::vector<int>& state(int i) const { return states_[i]; }
    int total_quanta(int i) const { return quanta_[i]; }

    // bijection contract: index_of(state(i)) == i
    int index_of(const std::vector<int>& occ) const;

    // indices of states with total quanta <= q
    std::vector<int> indices_with_quanta_at_most(int q) const;

    static std::int64_t dimension_for(int mode_count, int max_quanta);

private:
    int mode_count_;
    int max_quanta_;
    std::vector<std::vector<int>> states_;
    std::vector<int> quanta_;
    std::unordered_map<std::string, int> index_;
};

// -------------------------------------------------------------- FockOperator

struct FockOperator {
    const FockBasis* basis = nullptr;
    SpMat mat;
    bool hermitian_flag = false;

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(mat); }
    // max-entry deviation from self-adjointness relative to max entry
    double hermiticity_defect() const;
};

// ------------------------------------------------------------- constructions

// Exponential vector eps(h): coefficient on (n_1,...,n_M) is
// prod_k hhat_k^{n_k} / sqrt(n_k!), hhat = sqrt(mu) h; quanta beyond the
// cutoff are dropped.
Eigen::VectorXcd exponential_vector(const Eigen::VectorXcd& h, const ModeSpace& ms,
                                    const FockBasis& basis);

// Upper bound on the dropped tail of sum_{s>n} |z|^s / s!; valid for |z| < n+2.
double exp_tail_bound(double abs_z, int n);

// phi(f) = a(f) + a*(f); Hermitian; a(f) eps(h) = <f,h> eps(h).
FockOperator field_operator(const Eigen::VectorXcd& f, const ModeSpace& ms,
                            const FockBasis& basis);

// Diagonal dGamma(w) with per-mode values w (e.g. omega, min(omega,1), ones).
FockOperator second_quantization(const Eigen::VectorXd& w, const FockBasis& basis);

// Quadratic lift dGamma(K) = sum_{ij} K_ij a_i* a_j of a one-boson matrix
// acting on sqrt(mu)-scaled amplitudes. Quanta-preserving, hence exact on the
// truncated space.
FockOperator quadratic_lift(const Eigen::MatrixXcd& K, const FockBasis& basis);

// Occupation lift Gamma(U) = exp(dGamma(log U)), computed sector-by-sector.
FockOperator occupation_lift(const Eigen::MatrixXcd& U_scaled, const FockBasis& basis);

// W(f,U) = exp(a*(f) - a(f)) Gamma(U). U acts on raw amplitudes and must be
// unitary with respect to the weighted inner product (checked to 1e-12).
// Agrees with W(f,U) eps(h) = exp(-|f|^2/2 - <f,Uh>) eps(f+Uh) up to the
// truncation tail.
FockOperator weyl_operator(const Eigen::VectorXcd& f, const Eigen::MatrixXcd& U,
                           const ModeSpace& ms, const FockBasis& basis);

// ------------------------------------------------------- commutator defects

struct DefectResult {
    FockOperator op;          // restricted to the interior quanta subspace
    double norm = 0.0;        // spectral norm of the restriction
    double bound = 0.0;       // claimed bound for this defect
};

// C_eps(f) = theta_eps^{-1/2} phi(f) - phi(f) theta_eps^{-1/2},
// theta_eps = 1 + eps dGamma(omega); claimed norm <= (4/pi) sqrt(eps) |w^{1/2} f|.
DefectResult commutator_defect_C(const Eigen::VectorXcd& f, double eps,
                                 const ModeSpace& ms, const FockBasis& basis);

// T(f) = theta^{1/2} phi(f) theta^{-1/2} - phi(f), theta = 1 + dGamma(omega);
// claimed norm <= 2 |w^{1/2} f|.
DefectResult commutator_defect_T(const Eigen::VectorXcd& f, const ModeSpace& ms,
                                 const FockBasis& basis);

// ------------------------------------------------------------ bound sweeps

struct FieldBoundReport {
    // worst observed ratio (observed / claimed right-hand side) per bound
    double relative_bound = 0.0;     // |phi(f) psi| <= 2 |(w^{-1/2} v 1) f| |(1+dG)^{1/2} psi|
    double quadratic_form = 0.0;     // |<phi, phi(f) psi>| <= |w^{-1/2} f| (...)
    double double_field = 0.0;       // |phi(g) phi(f) psi| <= 8 ... |(1+dG) psi|
    int trials = 0;
    std::uint64_t seed = 0;
    bool pass(double tol = 1e-12) const {
        return relative_bound <= 1.0 + tol && quadratic_form <= 1.0 + tol &&
               double_field <= 1.0 + tol;
    }
};

// Randomized certification of the three field bounds on the interior
// subspace (quanta <= max_quanta - 2). The bounds are theorems; the sweep
// certifies the implementation.
FieldBoundReport verify_field_bounds(const ModeSpace& ms, const FockBasis& basis,
                                     int trials, std::uint64_t seed);

// ------------------------------------------------------------------ helpers

double spectral_norm_dense(const Eigen::MatrixXcd& m);

// rows/cols restricted to the given index set
Eigen::MatrixXcd restrict_dense(const Eigen::MatrixXcd& m, const std::vector<int>& idx);

}  // namespace pf
