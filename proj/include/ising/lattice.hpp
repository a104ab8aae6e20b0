#pragma once
// Finite hypercubic boxes and tori, ghost augmentation, planar duals,
// boundary conditions, Hamiltonians, even-subgraph streams, edge-list I/O.
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ising {

enum class LatticeKind { Box, Torus, Graph };

struct Lattice {
  LatticeKind kind = LatticeKind::Graph;
  std::vector<int> sides;  // vertex extents per axis (empty for Graph)
  int nv = 0;
  std::vector<std::array<int, 2>> edges;                // u < v
  std::vector<std::vector<std::pair<int, int>>> adj;    // vertex -> (neighbour, edge id)
  int ghost = -1;                                       // ghost vertex id, or -1

  int dim() const { return static_cast<int>(sides.size()); }
  bool periodic() const { return kind == LatticeKind::Torus; }
  int ne() const { return static_cast<int>(edges.size()); }
};

// Vertex indexing is row-major with axis 0 fastest:
// index = c0 + sides[0]*(c1 + sides[1]*(c2 + ...)).
std::vector<int> coord_of(const Lattice& lat, int v);
int vertex_at(const Lattice& lat, const std::vector<int>& c);

Lattice make_box(const std::vector<int>& sides);    // free box, every side >= 1
Lattice make_torus(const std::vector<int>& sides);  // every side >= 3
Lattice make_path(int n);                           // 1d box
Lattice make_ring(int n);                           // 1d torus
Lattice make_graph(int nv, const std::vector<std::array<int, 2>>& edges);

// per-edge couplings; empty per_edge means the uniform value everywhere
struct Coupling {
  double uniform = 1.0;
  std::vector<double> per_edge;
  double j(int e) const { return per_edge.empty() ? uniform : per_edge[static_cast<std::size_t>(e)]; }
  bool is_uniform() const { return per_edge.empty(); }
};

struct FieldSpec {
  double uniform = 0.0;
  std::vector<double> per_vertex;
  double h(int v) const { return per_vertex.empty() ? uniform : per_vertex[static_cast<std::size_t>(v)]; }
  bool zero() const;
};

enum class BcKind { Free, Plus, Minus, Dobrushin, Fixed };

// Boundary condition tau on the exterior sites of a box: the Hamiltonian gains
// -sum over exterior edges of sigma_x tau_y.  Dobrushin: tau_y = +1 iff
// y[axis] >= level.  Fixed: tau aligned with exterior_sites() order.
struct BoundaryCondition {
  BcKind kind = BcKind::Free;
  int axis = 0;
  int level = 0;
  std::vector<signed char> tau;
};

// Exterior lattice sites adjacent to a box, sorted lexicographically
// (each touches exactly one box vertex).
std::vector<std::vector<int>> exterior_sites(const Lattice& lat);

// number of exterior neighbours of each vertex (0 in the interior)
std::vector<int> exterior_degree(const Lattice& lat);

// effective per-vertex boundary field b_x = sum of tau over exterior neighbours
std::vector<double> exterior_field(const Lattice& lat, const BoundaryCondition& bc);

// vertices of a box with at least one exterior neighbour
std::vector<int> boundary_vertices(const Lattice& lat);

// Append a ghost vertex adjacent to `attach` (defaults handled by caller).
// The result is a Graph-kind lattice with .ghost set; extend couplings with
// unit J on the new edges (ghost edges come last, in `attach` order).
Lattice ghost_augment(const Lattice& lat, const std::vector<int>& attach);

struct DualLattice {
  Lattice dual;                    // Graph kind; vertex dual.nv-1 is the outer face
  int outer = 0;                   // outer-face vertex id
  std::vector<int> primal_edge;    // dual edge id -> primal edge id (bijection)
};

// Planar dual of a 2d free box: vertices are inner faces plus one outer face,
// one dual edge across each primal edge.
DualLattice dual_2d(const Lattice& box);

using SpinConfig = std::vector<signed char>;  // entries +1 / -1

// H(sigma) = -sum_e J_e s_u s_v - sum_x (h_x + b_x) s_x with b from bc.
double hamiltonian(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                   const BoundaryCondition& bc, const SpinConfig& s);

// Even subgraphs (every vertex of even degree), streamed as edge bitmasks in
// Gray-code order over the cycle space; count is 2^(E - V + #components).
std::uint64_t even_subgraph_count(const Lattice& lat);
void even_subgraphs(const Lattice& lat, const std::function<void(std::uint64_t)>& visit);

namespace detail {
// internal variant with a wider cap for the expansion engines
void even_subgraphs_impl(const Lattice& lat, int max_edges,
                         const std::function<void(std::uint64_t)>& visit);
}

// ---- text edge-list format -------------------------------------------------
// lines: "v <id>", "e <u> <v> <J>", comments start with '#'
struct ParsedGraph {
  Lattice lat;
  Coupling coup;
};
ParsedGraph parse_edge_list(const std::string& text);
std::string serialize_edge_list(const Lattice& lat, const Coupling& coup);

}  // namespace ising
