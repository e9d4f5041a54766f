#include "pf/fock.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "pf/rng.hpp"

namespace pf {

// ---------------------------------------------------------------- ModeSpace

ModeSpace::ModeSpace(Eigen::VectorXd omega, Eigen::VectorXd weight, double freq_floor)
    : omega_(std::move(omega)), weight_(std::move(weight)) {
    if (omega_.size() == 0) throw std::invalid_argument("ModeSpace: empty mode set");
    if (omega_.size() != weight_.size())
        throw std::invalid_argument("ModeSpace: omega/weight size mismatch");
    if (freq_floor > 0.0) omega_ = omega_.cwiseMax(freq_floor);
    for (Eigen::Index k = 0; k < omega_.size(); ++k) {
        if (!(omega_[k] > 0.0))
            throw std::invalid_argument("ModeSpace: omega must be strictly positive");
        if (!(weight_[k] > 0.0))
            throw std::invalid_argument("ModeSpace: weights must be strictly positive");
    }
}

cplx ModeSpace::inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h) const {
    return (f.conjugate().cwiseProduct(h).cwiseProduct(weight_.cast<cplx>())).sum();
}

double ModeSpace::norm(const Eigen::VectorXcd& f) const {
    return std::sqrt(std::real(inner(f, f)));
}

Eigen::VectorXcd ModeSpace::absorb(const Eigen::VectorXcd& f) const {
    return weight_.cwiseSqrt().cast<cplx>().cwiseProduct(f);
}

double ModeSpace::norm_omega_pow(const Eigen::VectorXcd& f, double exponent) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < omega_.size(); ++k)
        s += weight_[k] * std::pow(omega_[k], exponent) * std::norm(f[k]);
    return std::sqrt(s);
}

double ModeSpace::norm_invroot_or_one(const Eigen::VectorXcd& f) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < omega_.size(); ++k) {
        const double w = std::max(1.0 / std::sqrt(omega_[k]), 1.0);
        s += weight_[k] * w * w * std::norm(f[k]);
    }
    return std::sqrt(s);
}

// ---------------------------------------------------------------- FockBasis

namespace {

std::string pack_state(const std::vector<int>& occ) {
    std::string key(occ.size() * sizeof(int), '\0');
    std::memcpy(key.data(), occ.data(), key.size());
    return key;
}

void enumerate_grade(int modes, int total, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
    if (modes == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int n = 0; n <= total; ++n) {
        cur.push_back(n);
        enumerate_grade(modes - 1, total - n, cur, out);
        cur.pop_back();
    }
}

}  // namespace

FockBasis::FockBasis(int mode_count, int max_quanta)
    : mode_count_(mode_count), max_quanta_(max_quanta) {
    if (mode_count < 1) throw std::invalid_argument("FockBasis: need at least one mode");
    if (max_quanta < 0) throw std::invalid_argument("FockBasis: negative quanta cutoff");
    for (int n = 0; n <= max_quanta; ++n) {
        std::vector<int> cur;
        enumerate_grade(mode_count, n, cur, states_);
    }
    quanta_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        int q = 0;
        for (int nk : states_[i]) q += nk;
        quanta_.push_back(q);
        index_[pack_state(states_[i])] = static_cast<int>(i);
    }
}

int FockBasis::index_of(const std::vector<int>& occ) const {
    auto it = index_.find(pack_state(occ));
    if (it == index_.end()) return -1;
    return it->second;
}

std::vector<int> FockBasis::indices_with_quanta_at_most(int q) const {
    std::vector<int> idx;
    for (int i = 0; i < dim(); ++i)
        if (quanta_[i] <= q) idx.push_back(i);
    return idx;
}

std::int64_t FockBasis::dimension_for(int mode_count, int max_quanta) {
    // binomial(M + N, M)
    std::int64_t r = 1;
    for (int i = 1; i <= mode_count; ++i)
        r = r * (max_quanta + i) / i;
    return r;
}

// -------------------------------------------------------------- FockOperator

double FockOperator::hermiticity_defect() const {
    const Eigen::MatrixXcd d = Eigen::MatrixXcd(mat) - Eigen::MatrixXcd(mat).adjoint();
    const double scale = Eigen::MatrixXcd(mat).cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return d.cwiseAbs().maxCoeff() / scale;
}

// ------------------------------------------------------------- constructions

Eigen::VectorXcd exponential_vector(const Eigen::VectorXcd& h, const ModeSpace& ms,
                                    const FockBasis& basis) {
    const Eigen::VectorXcd hh = ms.absorb(h);
    Eigen::VectorXcd v(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
        const auto& occ = basis.state(i);
        cplx c = 1.0;
        for (int k = 0; k < basis.mode_count(); ++k) {
            for (int n = 1; n <= occ[k]; ++n) c *= hh[k] / std::sqrt(double(n));
        }
        v[i] = c;
    }
    return v;
}

double exp_tail_bound(double abs_z, int n) {
    // sum_{s>n} z^s/s!  <=  z^{n+1}/(n+1)! * 1/(1 - z/(n+2))
    double head = 1.0;
    for (int s = 1; s <= n + 1; ++s) head *= abs_z / double(s);
    const double r = abs_z / double(n + 2);
    if (r >= 1.0) return std::exp(abs_z);  // bound degenerates; fall back
    return head / (1.0 - r);
}

FockOperator field_operator(const Eigen::VectorXcd& f, const ModeSpace& ms,
                            const FockBasis& basis) {
    const Eigen::VectorXcd ff = ms.absorb(f);
    std::vector<Eigen::Triplet<cplx>> trips;
    std::vector<int> occ;
    for (int i = 0; i < basis.dim(); ++i) {
        occ = basis.state(i);
        for (int k = 0; k < basis.mode_count(); ++k) {
            if (ff[k] == cplx(0.0)) continue;
            // a_k: |n> -> sqrt(n_k) |n - e_k>, amplitude conj(f_k)
            if (occ[k] > 0) {
                occ[k] -= 1;
                const int j = basis.index_of(occ);
                occ[k] += 1;
                trips.emplace_back(j, i, std::conj(ff[k]) * std::sqrt(double(occ[k])));
            }
            // a_k^*: |n> -> sqrt(n_k + 1) |n + e_k>, amplitude f_k
            if (basis.total_quanta(i) < basis.max_quanta()) {
                occ[k] += 1;
                const int j = basis.index_of(occ);
                occ[k] -= 1;
                trips.emplace_back(j, i, ff[k] * std::sqrt(double(occ[k] + 1)));
            }
        }
    }
    FockOperator op;
    op.basis = &basis;
    op.mat.resize(basis.dim(), basis.dim());
    op.mat.setFromTriplets(trips.begin(), trips.end());
    op.hermitian_flag = true;
    return op;
}

FockOperator second_quantization(const Eigen::VectorXd& w, const FockBasis& basis) {
    if (w.size() != basis.mode_count())
        throw std::invalid_argument("second_quantization: size mismatch");
    for (Eigen::Index k = 0; k < w.size(); ++k)
        if (!std::isfinite(w[k]))
            throw std::invalid_argument("second_quantization: non-finite entry");
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int i = 0; i < basis.dim(); ++i) {
        double e = 0.0;
        const auto& occ = basis.state(i);
        for (int k = 0; k < basis.mode_count(); ++k) e += occ[k] * w[k];
        trips.emplace_back(i, i, cplx(e, 0.0));
    }
    FockOperator op;
    op.basis = &basis;
    op.mat.resize(basis.dim(), basis.dim());
    op.mat.setFromTriplets(trips.begin(), trips.end());
    op.hermitian_flag = true;
    return op;
}

FockOperator quadratic_lift(const Eigen::MatrixXcd& K, const FockBasis& basis) {
    const int M = basis.mode_count();
    if (K.rows() != M || K.cols() != M)
        throw std::invalid_argument("quadratic_lift: size mismatch");
    std::vector<Eigen::Triplet<cplx>> trips;
    std::vector<int> occ;
    for (int col = 0; col < basis.dim(); ++col) {
        occ = basis.state(col);
        for (int j = 0; j < M; ++j) {
            if (occ[j] == 0) continue;
            const double sj = std::sqrt(double(occ[j]));
            occ[j] -= 1;
            for (int i = 0; i < M; ++i) {
                if (K(i, j) == cplx(0.0)) continue;
                occ[i] += 1;
                const int row = basis.index_of(occ);
                occ[i] -= 1;
                const double si = std::sqrt(double(occ[i] + 1));
                trips.emplace_back(row, col, K(i, j) * si * sj);
            }
            occ[j] += 1;
        }
    }
    FockOperator op;
    op.basis = &basis;
    op.mat.resize(basis.dim(), basis.dim());
    op.mat.setFromTriplets(trips.begin(), trips.end());
    op.hermitian_flag = false;
    return op;
}

FockOperator occupation_lift(const Eigen::MatrixXcd& U_scaled, const FockBasis& basis) {
    // Gamma(U) = exp(dGamma(log U)), block by total-quanta sector.
    const Eigen::MatrixXcd K = U_scaled.log();
    const FockOperator dG = quadratic_lift(K, basis);
    const Eigen::MatrixXcd dGd = dG.dense();

    FockOperator op;
    op.basis = &basis;
    op.mat.resize(basis.dim(), basis.dim());
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int q = 0; q <= basis.max_quanta(); ++q) {
        std::vector<int> sector;
        for (int i = 0; i < basis.dim(); ++i)
            if (basis.total_quanta(i) == q) sector.push_back(i);
        Eigen::MatrixXcd blk(sector.size(), sector.size());
        for (std::size_t a = 0; a < sector.size(); ++a)
            for (std::size_t b = 0; b < sector.size(); ++b)
                blk(a, b) = dGd(sector[a], sector[b]);
        const Eigen::MatrixXcd e = blk.exp();
        for (std::size_t a = 0; a < sector.size(); ++a)
            for (std::size_t b = 0; b < sector.size(); ++b)
                if (std::abs(e(a, b)) > 1e-300)
                    trips.emplace_back(sector[a], sector[b], e(a, b));
    }
    op.mat.setFromTriplets(trips.begin(), trips.end());
    return op;
}

FockOperator weyl_operator(const Eigen::VectorXcd& f, const Eigen::MatrixXcd& U,
                           const ModeSpace& ms, const FockBasis& basis) {
    const int M = basis.mode_count();
    // U acts on raw amplitudes; conjugate by sqrt(mu) to get the counting
    // measure representative, which must be unitary.
    Eigen::MatrixXcd Us(M, M);
    const Eigen::VectorXd sq = ms.weight().cwiseSqrt();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) Us(i, j) = sq[i] * U(i, j) / sq[j];
    const double defect =
        (Us.adjoint() * Us - Eigen::MatrixXcd::Identity(M, M)).cwiseAbs().maxCoeff();
    if (defect > 1e-12)
        throw std::invalid_argument("weyl_operator: U is not unitary (defect " +
                                    std::to_string(defect) + ")");

    const Eigen::VectorXcd ff = ms.absorb(f);
    // generator a*(f) - a(f)
    FockOperator phi_if = field_operator(
        Eigen::VectorXcd(cplx(0.0, 1.0) * f), ms, basis);  // phi(if) = i(a*(f)-a(f))
    const Eigen::MatrixXcd gen = cplx(0.0, -1.0) * phi_if.dense();
    const Eigen::MatrixXcd disp = gen.exp();

    const FockOperator gamma = occupation_lift(Us, basis);
    FockOperator op;
    op.basis = &basis;
    op.mat = (disp * gamma.dense()).sparseView(1e-300);
    return op;
}

// ------------------------------------------------------- commutator defects

namespace {

Eigen::VectorXd theta_diagonal(const ModeSpace& ms, const FockBasis& basis, double eps) {
    Eigen::VectorXd d(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
        double e = 0.0;
        const auto& occ = basis.state(i);
        for (int k = 0; k < basis.mode_count(); ++k) e += occ[k] * ms.omega()[k];
        d[i] = 1.0 + eps * e;
    }
    return d;
}

}  // namespace

DefectResult commutator_defect_C(const Eigen::VectorXcd& f, double eps,
                                 const ModeSpace& ms, const FockBasis& basis) {
    if (!(eps > 0.0)) throw std::invalid_argument("commutator_defect_C: eps must be > 0");
    const Eigen::MatrixXcd phi = field_operator(f, ms, basis).dense();
    const Eigen::VectorXd th = theta_diagonal(ms, basis, eps);
    const Eigen::VectorXd ti = th.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXcd C = ti.cast<cplx>().asDiagonal() * phi - phi * ti.cast<cplx>().asDiagonal();

    const auto interior = basis.indices_with_quanta_at_most(basis.max_quanta() - 2);
    const Eigen::MatrixXcd Cr = restrict_dense(C, interior);

    DefectResult r;
    r.op.basis = &basis;
    r.op.mat = C.sparseView(1e-300);
    r.norm = spectral_norm_dense(Cr);
    r.bound = (4.0 / M_PI) * std::sqrt(eps) * ms.norm_omega_pow(f, 0.5);
    return r;
}

DefectResult commutator_defect_T(const Eigen::VectorXcd& f, const ModeSpace& ms,
                                 const FockBasis& basis) {
    const Eigen::MatrixXcd phi = field_operator(f, ms, basis).dense();
    const Eigen::VectorXd th = theta_diagonal(ms, basis, 1.0);
    const Eigen::VectorXd sq = th.cwiseSqrt();
    const Eigen::VectorXd si = sq.cwiseInverse();
    Eigen::MatrixXcd T =
        sq.cast<cplx>().asDiagonal() * phi * si.cast<cplx>().asDiagonal() - phi;

    const auto interior = basis.indices_with_quanta_at_most(basis.max_quanta() - 2);
    const Eigen::MatrixXcd Tr = restrict_dense(T, interior);

    DefectResult r;
    r.op.basis = &basis;
    r.op.mat = T.sparseView(1e-300);
    r.norm = spectral_norm_dense(Tr);
    r.bound = 2.0 * ms.norm_omega_pow(f, 0.5);
    return r;
}

// ------------------------------------------------------------ bound sweeps

FieldBoundReport verify_field_bounds(const ModeSpace& ms, const FockBasis& basis,
                                     int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("verify_field_bounds: trials >= 1");
    Rng rng(seed);
    const int M = basis.mode_count();
    const auto interior = basis.indices_with_quanta_at_most(basis.max_quanta() - 2);

    const Eigen::VectorXd dg = [&] {
        Eigen::VectorXd d(basis.dim());
        for (int i = 0; i < basis.dim(); ++i) {
            double e = 0.0;
            for (int k = 0; k < M; ++k) e += basis.state(i)[k] * ms.omega()[k];
            d[i] = e;
        }
        return d;
    }();

    FieldBoundReport rep;
    rep.trials = trials;
    rep.seed = seed;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXcd f = rng.cvector(M);
        const Eigen::VectorXcd g = rng.cvector(M);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dim());
        Eigen::VectorXcd phiv = Eigen::VectorXcd::Zero(basis.dim());
        for (int i : interior) {
            psi[i] = rng.cgaussian();
            phiv[i] = rng.cgaussian();
        }
        psi.normalize();
        phiv.normalize();

        const SpMat Pf = field_operator(f, ms, basis).mat;
        const SpMat Pg = field_operator(g, ms, basis).mat;

        const Eigen::VectorXcd Pf_psi = Pf * psi;
        const double lhs1 = Pf_psi.norm();
        const double rhs1 = 2.0 * ms.norm_invroot_or_one(f) *
                            std::sqrt(psi.dot((1.0 + dg.array()).matrix().cast<cplx>()
                                                  .cwiseProduct(psi))
                                          .real());
        rep.relative_bound = std::max(rep.relative_bound, lhs1 / rhs1);

        const double lhs2 = std::abs(phiv.dot(Pf_psi));
        const double dph = std::sqrt(
            phiv.dot(dg.cast<cplx>().cwiseProduct(phiv)).real());
        const double dps = std::sqrt(psi.dot(dg.cast<cplx>().cwiseProduct(psi)).real());
        const double rhs2 = ms.norm_omega_pow(f, -0.5) * (dph * 1.0 + 1.0 * dps);
        if (rhs2 > 0.0) rep.quadratic_form = std::max(rep.quadratic_form, lhs2 / rhs2);

        const double lhs3 = (Pg * Pf_psi).norm();
        const double rhs3 = 8.0 * ms.norm_invroot_or_one(g) * ms.norm_invroot_or_one(f) *
                            ((1.0 + dg.array()).matrix().cast<cplx>().cwiseProduct(psi)).norm();
        rep.double_field = std::max(rep.double_field, lhs3 / rhs3);
    }
    return rep;
}

// ------------------------------------------------------------------ helpers

double spectral_norm_dense(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()[0];
}

Eigen::MatrixXcd restrict_dense(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
    Eigen::MatrixXcd r(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) r(a, b) = m(idx[a], idx[b]);
    return r;
}

}  // namespace pf
