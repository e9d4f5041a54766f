#include "pf/lattice.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pf {

namespace {

int flat_cell(const std::vector<int>& shape, const std::array<int, 3>& c) {
    int f = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) f = f * shape[a] + c[a];
    return f;
}

}  // namespace

void LatticeDomain::finalize(std::vector<char> mask) {
    const int cells = static_cast<int>(mask.size());
    node_of_cell_.assign(cells, -1);
    cell_of_node_.clear();
    for (int c = 0; c < cells; ++c) {
        if (mask[c]) {
            node_of_cell_[c] = static_cast<int>(cell_of_node_.size());
            cell_of_node_.push_back(c);
        }
    }
    if (cell_of_node_.empty()) throw std::invalid_argument("LatticeDomain: empty mask");
    if (bc_ == Bc::neumann) {
        for (int n = 0; n < node_count(); ++n) {
            bool connected = false;
            for (int a = 0; a < dim_ && !connected; ++a)
                for (int d : {+1, -1})
                    if (neighbor(n, a, d) >= 0) {
                        connected = true;
                        break;
                    }
            if (!connected && node_count() > 1)
                throw std::invalid_argument(
                    "LatticeDomain: Neumann mask has an isolated node");
        }
    }
}

LatticeDomain LatticeDomain::masked(Bc bc, double h, const std::vector<int>& shape,
                                    const std::vector<double>& origin,
                                    const std::function<bool(const Eigen::VectorXd&)>& keep) {
    if (shape.empty() || shape.size() > 3)
        throw std::invalid_argument("LatticeDomain: dim must be 1, 2 or 3");
    if (!(h > 0.0)) throw std::invalid_argument("LatticeDomain: spacing must be > 0");
    if (origin.size() != shape.size())
        throw std::invalid_argument("LatticeDomain: origin/shape size mismatch");
    LatticeDomain dom;
    dom.dim_ = static_cast<int>(shape.size());
    dom.h_ = h;
    dom.bc_ = bc;
    dom.shape_ = shape;
    dom.origin_ = origin;

    int cells = 1;
    for (int s : shape) {
        if (s < 1) throw std::invalid_argument("LatticeDomain: shape entries must be >= 1");
        cells *= s;
    }
    std::vector<char> mask(cells, 0);
    std::array<int, 3> c{0, 0, 0};
    for (int f = 0; f < cells; ++f) {
        int rem = f;
        for (int a = dom.dim_ - 1; a >= 0; --a) {
            c[a] = rem % shape[a];
            rem /= shape[a];
        }
        Eigen::VectorXd x(dom.dim_);
        for (int a = 0; a < dom.dim_; ++a) x[a] = origin[a] + h * c[a];
        mask[f] = keep(x) ? 1 : 0;
    }
    dom.finalize(std::move(mask));
    return dom;
}

LatticeDomain LatticeDomain::box(Bc bc, double h, const std::vector<int>& shape,
                                 const std::vector<double>& origin) {
    return masked(bc, h, shape, origin, [](const Eigen::VectorXd&) { return true; });
}

LatticeDomain LatticeDomain::ball(Bc bc, double h, const std::vector<int>& shape,
                                  const std::vector<double>& origin,
                                  const std::vector<double>& center, double radius) {
    return masked(bc, h, shape, origin, [&](const Eigen::VectorXd& x) {
        double r2 = 0.0;
        for (int a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return r2 <= radius * radius;
    });
}

LatticeDomain LatticeDomain::box_minus_ball(Bc bc, double h, const std::vector<int>& shape,
                                            const std::vector<double>& origin,
                                            const std::vector<double>& center, double radius) {
    return masked(bc, h, shape, origin, [&](const Eigen::VectorXd& x) {
        double r2 = 0.0;
        for (int a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return r2 > radius * radius;
    });
}

LatticeDomain LatticeDomain::l_shape(Bc bc, double h, const std::vector<int>& shape,
                                     const std::vector<double>& origin) {
    std::vector<double> mid(shape.size());
    for (std::size_t a = 0; a < shape.size(); ++a)
        mid[a] = origin[a] + 0.5 * h * (shape[a] - 1);
    return masked(bc, h, shape, origin, [&](const Eigen::VectorXd& x) {
        bool upper = true;
        for (int a = 0; a < x.size(); ++a) upper = upper && (x[a] > mid[a]);
        return !upper;
    });
}

LatticeDomain LatticeDomain::from_mask_file(const std::string& path, Bc bc) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mask file: " + path);
    int nu = 0;
    double h = 0.0;
    in >> nu >> h;
    if (nu < 1 || nu > 3) throw std::runtime_error("mask file: bad dimension");
    std::vector<int> shape(nu);
    for (int a = 0; a < nu; ++a) in >> shape[a];
    std::vector<double> origin(nu);
    for (int a = 0; a < nu; ++a) in >> origin[a];
    int cells = 1;
    for (int s : shape) cells *= s;
    std::vector<char> flags(cells);
    for (int f = 0; f < cells; ++f) {
        int v = 0;
        if (!(in >> v)) throw std::runtime_error("mask file: truncated flags");
        flags[f] = v ? 1 : 0;
    }
    LatticeDomain dom;
    dom.dim_ = nu;
    dom.h_ = h;
    dom.bc_ = bc;
    dom.shape_ = shape;
    dom.origin_ = origin;
    dom.finalize(std::move(flags));
    return dom;
}

void LatticeDomain::save_mask_file(const std::string& path) const {
    std::ofstream out(path);
    out << dim_ << " " << h_;
    for (int a = 0; a < dim_; ++a) out << " " << shape_[a];
    for (int a = 0; a < dim_; ++a) out << " " << origin_[a];
    out << "\n";
    int cells = 1;
    for (int s : shape_) cells *= s;
    for (int f = 0; f < cells; ++f) out << (node_of_cell_[f] >= 0 ? 1 : 0) << "\n";
}

Eigen::VectorXd LatticeDomain::node_coord(int node) const {
    const auto c = node_cell(node);
    Eigen::VectorXd x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + h_ * c[a];
    return x;
}

std::array<int, 3> LatticeDomain::node_cell(int node) const {
    std::array<int, 3> c{0, 0, 0};
    int rem = cell_of_node_[node];
    for (int a = dim_ - 1; a >= 0; --a) {
        c[a] = rem % shape_[a];
        rem /= shape_[a];
    }
    return c;
}

int LatticeDomain::node_at(const std::array<int, 3>& cell) const {
    for (int a = 0; a < dim_; ++a)
        if (cell[a] < 0 || cell[a] >= shape_[a]) return -1;
    return node_of_cell_[flat_cell(shape_, cell)];
}

int LatticeDomain::neighbor(int node, int axis, int dir) const {
    auto c = node_cell(node);
    c[axis] += dir;
    return node_at(c);
}

// --------------------------------------------------------------- potentials

ScalarPotential ScalarPotential::zero(const LatticeDomain& dom) {
    ScalarPotential v;
    v.v_plus = Eigen::VectorXd::Zero(dom.node_count());
    v.v_minus = Eigen::VectorXd::Zero(dom.node_count());
    return v;
}

ScalarPotential ScalarPotential::from_functions(
    const LatticeDomain& dom, const std::function<double(const Eigen::VectorXd&)>& plus,
    const std::function<double(const Eigen::VectorXd&)>& minus) {
    ScalarPotential v;
    v.v_plus.resize(dom.node_count());
    v.v_minus.resize(dom.node_count());
    for (int n = 0; n < dom.node_count(); ++n) {
        const auto x = dom.node_coord(n);
        v.v_plus[n] = plus(x);
        v.v_minus[n] = minus(x);
    }
    v.validate(dom.node_count());
    return v;
}

void ScalarPotential::validate(int node_count) const {
    if (v_plus.size() != node_count || v_minus.size() != node_count)
        throw std::invalid_argument("ScalarPotential: size mismatch");
    if ((v_plus.array() < 0.0).any() || (v_minus.array() < 0.0).any())
        throw std::invalid_argument("ScalarPotential: V+ and V- must be non-negative");
}

VectorPotential VectorPotential::zero(const LatticeDomain& dom) {
    VectorPotential a;
    a.link = Eigen::MatrixXd::Zero(dom.node_count(), dom.dim());
    return a;
}

VectorPotential VectorPotential::from_function(
    const LatticeDomain& dom,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& a) {
    VectorPotential v;
    v.link.resize(dom.node_count(), dom.dim());
    for (int n = 0; n < dom.node_count(); ++n) {
        for (int j = 0; j < dom.dim(); ++j) {
            Eigen::VectorXd mid = dom.node_coord(n);
            mid[j] += 0.5 * dom.spacing();
            v.link(n, j) = a(mid)[j];
        }
    }
    return v;
}

double MatterOperator::hermiticity_defect() const {
    const Eigen::MatrixXcd d = Eigen::MatrixXcd(mat);
    const double scale = d.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (d - d.adjoint()).cwiseAbs().maxCoeff() / scale;
}

// ------------------------------------------------------ covariant difference

MatterOperator covariant_difference(const LatticeDomain& dom, const VectorPotential& A,
                                    int axis) {
    if (axis < 0 || axis >= dom.dim())
        throw std::invalid_argument("covariant_difference: axis out of range");
    const double h = dom.spacing();
    const cplx mih(0.0, -1.0 / h);
    std::vector<Eigen::Triplet<cplx>> trips;
    int rows = dom.node_count();
    for (int n = 0; n < dom.node_count(); ++n) {
        const int nb = dom.neighbor(n, axis, +1);
        if (nb >= 0) {
            const cplx phase = std::exp(cplx(0.0, -h * A.link(n, axis)));
            trips.emplace_back(n, nb, mih * phase);
            trips.emplace_back(n, n, -mih);
        } else if (dom.bc() == Bc::dirichlet) {
            trips.emplace_back(n, n, -mih);  // zero extension keeps the diagonal term
        }
        if (dom.bc() == Bc::dirichlet && dom.neighbor(n, axis, -1) < 0) {
            // incoming link from the wall cell behind n
            trips.emplace_back(rows++, n, mih);
        }
    }
    MatterOperator w;
    w.mat.resize(rows, dom.node_count());
    w.mat.setFromTriplets(trips.begin(), trips.end());
    w.hermitian_flag = false;
    return w;
}

SpMat square_part(const SpMat& w, int node_count) {
    return SpMat(w.topRows(node_count));
}

MatterOperator schrodinger_operator(const LatticeDomain& dom, const VectorPotential& A,
                                    const ScalarPotential& V) {
    V.validate(dom.node_count());
    SpMat s(dom.node_count(), dom.node_count());
    for (int j = 0; j < dom.dim(); ++j) {
        const SpMat w = covariant_difference(dom, A, j).mat;
        s += SpMat(0.5 * (SpMat(w.adjoint()) * w));
    }
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int n = 0; n < dom.node_count(); ++n)
        trips.emplace_back(n, n, cplx(V.v_plus[n] - V.v_minus[n], 0.0));
    SpMat diag(dom.node_count(), dom.node_count());
    diag.setFromTriplets(trips.begin(), trips.end());
    MatterOperator op;
    op.mat = s + diag;
    op.hermitian_flag = true;
    return op;
}

VectorPotential apply_gauge(const LatticeDomain& dom, const VectorPotential& A,
                            const Eigen::VectorXd& chi) {
    VectorPotential out = A;
    for (int n = 0; n < dom.node_count(); ++n)
        for (int j = 0; j < dom.dim(); ++j) {
            const int nb = dom.neighbor(n, j, +1);
            if (nb >= 0) out.link(n, j) += (chi[nb] - chi[n]) / dom.spacing();
        }
    return out;
}

// ----------------------------------------------------------------- KLMN fit

KlmnResult klmn_estimate(const LatticeDomain& dom, const ScalarPotential& V,
                         const std::vector<double>& b_grid) {
    V.validate(dom.node_count());
    ScalarPotential vp = V;
    vp.v_minus.setZero();
    const Eigen::MatrixXcd S =
        Eigen::MatrixXcd(schrodinger_operator(dom, VectorPotential::zero(dom), vp).mat);
    // tiny shift keeps the pencil definite when the Neumann kernel is present
    const double scale = S.cwiseAbs().maxCoeff() + V.v_minus.maxCoeff() + 1.0;
    const Eigen::MatrixXcd Sreg =
        S + 1e-12 * scale * Eigen::MatrixXcd::Identity(S.rows(), S.cols());

    KlmnResult res;
    for (double b : b_grid) {
        Eigen::MatrixXcd Amat = Eigen::MatrixXcd::Zero(S.rows(), S.cols());
        for (int n = 0; n < dom.node_count(); ++n) Amat(n, n) = V.v_minus[n] - b;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(Amat, Sreg);
        const double a = std::max(0.0, ges.eigenvalues().maxCoeff());
        res.frontier.push_back({b, a});
        if (a < 1.0) res.feasible = true;
    }
    return res;
}

}  // namespace pf
