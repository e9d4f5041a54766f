// lattice.hpp — masked finite-difference grids for open domains, Peierls-phased
// covariant differences, Dirichlet/Neumann boundary schemes, and electrostatic
// potentials V = V+ - V-.

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pf/fock.hpp"  // cplx, SpMat

namespace pf {

enum class Bc { dirichlet, neumann };

// Masked grid over a box of shape n_1 x ... x n_nu with uniform spacing h.
// Node coordinates are origin + h * (i_1,...,i_nu). Flat cell order is
// row-major with the first axis slowest. Dirichlet extends functions by zero
// beyond the mask; Neumann drops off-mask links from the difference stencil.
class LatticeDomain {
public:
    static LatticeDomain box(Bc bc, double h, const std::vector<int>& shape,
                             const std::vector<double>& origin);
    // mask predicate sampled at node coordinates
    static LatticeDomain masked(Bc bc, double h, const std::vector<int>& shape,
                                const std::vector<double>& origin,
                                const std::function<bool(const Eigen::VectorXd&)>& keep);
    static LatticeDomain ball(Bc bc, double h, const std::vector<int>& shape,
                              const std::vector<double>& origin,
                              const std::vector<double>& center, double radius);
    static LatticeDomain box_minus_ball(Bc bc, double h, const std::vector<int>& shape,
                                        const std::vector<double>& origin,
                                        const std::vector<double>& center, double radius);
    // box with the upper-right quadrant removed
    static LatticeDomain l_shape(Bc bc, double h, const std::vector<int>& shape,
                                 const std::vector<double>& origin);

    static LatticeDomain from_mask_file(const std::string& path, Bc bc);
    void save_mask_file(const std::string& path) const;

    int dim() const { return dim_; }
    double spacing() const { return h_; }
    Bc bc() const { return bc_; }
    int node_count() const { return static_cast<int>(cell_of_node_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    const std::vector<double>& origin() const { return origin_; }

    Eigen::VectorXd node_coord(int node) const;
    // grid index tuple of a node
    std::array<int, 3> node_cell(int node) const;
    // neighboring node along axis (dir = +1/-1); -1 when off-mask or off-grid
    int neighbor(int node, int axis, int dir) const;
    // node index at given grid tuple; -1 if unmasked/out of range
    int node_at(const std::array<int, 3>& cell) const;

private:
    LatticeDomain() = default;
    void finalize(std::vector<char> mask);

    int dim_ = 0;
    double h_ = 0.0;
    Bc bc_ = Bc::dirichlet;
    std::vector<int> shape_;
    std::vector<double> origin_;
    std::vector<int> node_of_cell_;  // -1 where unmasked
    std::vector<int> cell_of_node_;
};

struct ScalarPotential {
    Eigen::VectorXd v_plus;
    Eigen::VectorXd v_minus;

    static ScalarPotential zero(const LatticeDomain& dom);
    static ScalarPotential from_functions(const LatticeDomain& dom,
                                          const std::function<double(const Eigen::VectorXd&)>& plus,
                                          const std::function<double(const Eigen::VectorXd&)>& minus);
    void validate(int node_count) const;
};

// A_j sampled at the midpoint of the link (x, x + h e_j); row = source node.
struct VectorPotential {
    Eigen::MatrixXd link;  // node_count x dim

    static VectorPotential zero(const LatticeDomain& dom);
    static VectorPotential from_function(
        const LatticeDomain& dom,
        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& a);
};

struct MatterOperator {
    SpMat mat;
    bool hermitian_flag = false;
    double hermiticity_defect() const;
};

// Forward covariant difference with Peierls link phase,
//   (W_j Psi)(x) = -i [ e^{-i h A_j(x + h e_j/2)} Psi(x + h e_j) - Psi(x) ] / h.
// Dirichlet: functions are extended by zero beyond the mask, so the -Psi(x)
// term survives at every masked row, and wall cells with a masked forward
// neighbor contribute extra rows (appended after the masked ones) carrying the
// incoming link; their phases are inert and fixed to one. This makes
// 1/2 W^* W the textbook Dirichlet kinetic matrix. Neumann: square, rows
// without a forward link are dropped entirely.
// Columns are always indexed by masked nodes.
MatterOperator covariant_difference(const LatticeDomain& dom, const VectorPotential& A, int axis);

// masked-rows-only block of the covariant difference (what couples to fields)
SpMat square_part(const SpMat& w, int node_count);

// S = 1/2 sum_j W_j^* W_j + diag(V+ - V-)
MatterOperator schrodinger_operator(const LatticeDomain& dom, const VectorPotential& A,
                                    const ScalarPotential& V);

// Lattice gauge transformation: A'_j(x+he_j/2) = A_j + (chi(x+he_j)-chi(x))/h
// on existing links. Together with Psi -> e^{i chi} Psi this conjugates W_j.
VectorPotential apply_gauge(const LatticeDomain& dom, const VectorPotential& A,
                            const Eigen::VectorXd& chi);

// Relative form bound of V- against the kinetic-plus-V+ form. For each b the
// minimal a with  <Psi, V- Psi> <= a s[Psi] + b |Psi|^2  is the largest
// eigenvalue of the pencil (diag(V-) - b, S^{0,V+}), clamped at zero.
struct KlmnPoint {
    double b = 0.0;
    double a = 0.0;
};
struct KlmnResult {
    std::vector<KlmnPoint> frontier;
    bool feasible = false;  // true when some sampled b admits a < 1
};
KlmnResult klmn_estimate(const LatticeDomain& dom, const ScalarPotential& V,
                         const std::vector<double>& b_grid);

}  // namespace pf
