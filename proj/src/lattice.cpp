#include "ising/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ising/common.hpp"

namespace ising {

namespace {

void finalize(Lattice& lat) {
  lat.adj.assign(static_cast<std::size_t>(lat.nv), {});
  for (int e = 0; e < lat.ne(); ++e) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    if (u < 0 || v < 0 || u >= lat.nv || v >= lat.nv)
      throw std::invalid_argument("lattice: edge endpoint out of range");
    lat.adj[static_cast<std::size_t>(u)].push_back({v, e});
    if (v != u) lat.adj[static_cast<std::size_t>(v)].push_back({u, e});
  }
}

Lattice make_hypercubic(const std::vector<int>& sides, bool periodic) {
  if (sides.empty()) throw std::invalid_argument("lattice: need at least one axis");
  Lattice lat;
  lat.kind = periodic ? LatticeKind::Torus : LatticeKind::Box;
  lat.sides = sides;
  long long nv = 1;
  for (int s : sides) {
    if (!periodic && s < 1) throw std::invalid_argument("box: sides must be >= 1");
    if (periodic && s < 3) throw std::invalid_argument("torus: sides must be >= 3");
    nv *= s;
    if (nv > (1 << 28)) throw std::invalid_argument("lattice: too many vertices");
  }
  lat.nv = static_cast<int>(nv);
  const int d = lat.dim();
  std::vector<int> stride(static_cast<std::size_t>(d), 1);
  for (int k = 1; k < d; ++k)
    stride[static_cast<std::size_t>(k)] = stride[static_cast<std::size_t>(k - 1)] * sides[static_cast<std::size_t>(k - 1)];
  std::vector<int> c(static_cast<std::size_t>(d), 0);
  for (int v = 0; v < lat.nv; ++v) {
    for (int k = 0; k < d; ++k) {
      int ck = c[static_cast<std::size_t>(k)];
      int sk = sides[static_cast<std::size_t>(k)];
      if (ck + 1 < sk) {
        lat.edges.push_back({std::min(v, v + stride[static_cast<std::size_t>(k)]),
                             std::max(v, v + stride[static_cast<std::size_t>(k)])});
      } else if (periodic && sk >= 3) {
        int w = v - ck * stride[static_cast<std::size_t>(k)];  // wrap to c_k = 0
        lat.edges.push_back({std::min(v, w), std::max(v, w)});
      }
    }
    // increment mixed-radix coordinate, axis 0 fastest
    for (int k = 0; k < d; ++k) {
      if (++c[static_cast<std::size_t>(k)] < sides[static_cast<std::size_t>(k)]) break;
      c[static_cast<std::size_t>(k)] = 0;
    }
  }
  finalize(lat);
  return lat;
}

}  // namespace

std::vector<int> coord_of(const Lattice& lat, int v) {
  if (lat.kind == LatticeKind::Graph) throw std::invalid_argument("coord_of: graph lattice has no coordinates");
  if (v < 0 || v >= lat.nv) throw std::invalid_argument("coord_of: vertex out of range");
  std::vector<int> c(static_cast<std::size_t>(lat.dim()));
  for (int k = 0; k < lat.dim(); ++k) {
    int s = lat.sides[static_cast<std::size_t>(k)];
    c[static_cast<std::size_t>(k)] = v % s;
    v /= s;
  }
  return c;
}

int vertex_at(const Lattice& lat, const std::vector<int>& c) {
  if (lat.kind == LatticeKind::Graph) throw std::invalid_argument("vertex_at: graph lattice has no coordinates");
  if (static_cast<int>(c.size()) != lat.dim()) throw std::invalid_argument("vertex_at: wrong dimension");
  int v = 0;
  for (int k = lat.dim() - 1; k >= 0; --k) {
    int s = lat.sides[static_cast<std::size_t>(k)];
    int ck = c[static_cast<std::size_t>(k)];
    if (ck < 0 || ck >= s) throw std::invalid_argument("vertex_at: coordinate out of range");
    v = v * s + ck;
  }
  return v;
}

Lattice make_box(const std::vector<int>& sides) { return make_hypercubic(sides, false); }
Lattice make_torus(const std::vector<int>& sides) { return make_hypercubic(sides, true); }
Lattice make_path(int n) { return make_box({n}); }
Lattice make_ring(int n) { return make_torus({n}); }

Lattice make_graph(int nv, const std::vector<std::array<int, 2>>& edges) {
  Lattice lat;
  lat.kind = LatticeKind::Graph;
  lat.nv = nv;
  for (auto [u, v] : edges) {
    if (u == v) throw std::invalid_argument("make_graph: self-loop");
    lat.edges.push_back({std::min(u, v), std::max(u, v)});
  }
  finalize(lat);
  return lat;
}

bool FieldSpec::zero() const {
  if (per_vertex.empty()) return uniform == 0.0;
  for (double x : per_vertex)
    if (x != 0.0) return false;
  return true;
}

std::vector<int> exterior_degree(const Lattice& lat) {
  if (lat.kind != LatticeKind::Box) throw std::invalid_argument("exterior_degree: box lattices only");
  std::vector<int> deg(static_cast<std::size_t>(lat.nv), 0);
  for (int v = 0; v < lat.nv; ++v) {
    auto c = coord_of(lat, v);
    for (int k = 0; k < lat.dim(); ++k) {
      if (c[static_cast<std::size_t>(k)] == 0) ++deg[static_cast<std::size_t>(v)];
      if (c[static_cast<std::size_t>(k)] == lat.sides[static_cast<std::size_t>(k)] - 1) ++deg[static_cast<std::size_t>(v)];
    }
  }
  return deg;
}

std::vector<int> boundary_vertices(const Lattice& lat) {
  auto deg = exterior_degree(lat);
  std::vector<int> out;
  for (int v = 0; v < lat.nv; ++v)
    if (deg[static_cast<std::size_t>(v)] > 0) out.push_back(v);
  return out;
}

std::vector<std::vector<int>> exterior_sites(const Lattice& lat) {
  if (lat.kind != LatticeKind::Box) throw std::invalid_argument("exterior_sites: box lattices only");
  std::vector<std::vector<int>> sites;
  for (int v = 0; v < lat.nv; ++v) {
    auto c = coord_of(lat, v);
    for (int k = 0; k < lat.dim(); ++k) {
      if (c[static_cast<std::size_t>(k)] == 0) {
        auto y = c;
        y[static_cast<std::size_t>(k)] -= 1;
        sites.push_back(y);
      }
      if (c[static_cast<std::size_t>(k)] == lat.sides[static_cast<std::size_t>(k)] - 1) {
        auto y = c;
        y[static_cast<std::size_t>(k)] += 1;
        sites.push_back(y);
      }
    }
  }
  std::sort(sites.begin(), sites.end());
  return sites;
}

std::vector<double> exterior_field(const Lattice& lat, const BoundaryCondition& bc) {
  std::vector<double> b(static_cast<std::size_t>(lat.nv), 0.0);
  if (bc.kind == BcKind::Free) return b;
  if (lat.kind != LatticeKind::Box)
    throw std::invalid_argument("boundary conditions other than free require a box lattice");
  if (bc.kind == BcKind::Plus || bc.kind == BcKind::Minus) {
    auto deg = exterior_degree(lat);
    double s = bc.kind == BcKind::Plus ? 1.0 : -1.0;
    for (int v = 0; v < lat.nv; ++v) b[static_cast<std::size_t>(v)] = s * deg[static_cast<std::size_t>(v)];
    return b;
  }
  auto sites = exterior_sites(lat);
  if (bc.kind == BcKind::Fixed && bc.tau.size() != sites.size())
    throw std::invalid_argument("fixed bc: tau must match exterior_sites() length");
  if (bc.kind == BcKind::Dobrushin && (bc.axis < 0 || bc.axis >= lat.dim()))
    throw std::invalid_argument("dobrushin bc: axis out of range");
  for (int v = 0; v < lat.nv; ++v) {
    auto c = coord_of(lat, v);
    for (int k = 0; k < lat.dim(); ++k) {
      for (int dir : {-1, +1}) {
        int edge_side = dir < 0 ? 0 : lat.sides[static_cast<std::size_t>(k)] - 1;
        if (c[static_cast<std::size_t>(k)] != edge_side) continue;
        auto y = c;
        y[static_cast<std::size_t>(k)] += dir;
        double tau;
        if (bc.kind == BcKind::Dobrushin) {
          tau = y[static_cast<std::size_t>(bc.axis)] >= bc.level ? 1.0 : -1.0;
        } else {  // Fixed
          auto it = std::lower_bound(sites.begin(), sites.end(), y);
          tau = static_cast<double>(bc.tau[static_cast<std::size_t>(it - sites.begin())]);
        }
        b[static_cast<std::size_t>(v)] += tau;
      }
    }
  }
  return b;
}

Lattice ghost_augment(const Lattice& lat, const std::vector<int>& attach) {
  Lattice g;
  g.kind = LatticeKind::Graph;
  g.nv = lat.nv + 1;
  g.edges = lat.edges;
  g.ghost = lat.nv;
  for (int v : attach) {
    if (v < 0 || v >= lat.nv) throw std::invalid_argument("ghost_augment: attach vertex out of range");
    g.edges.push_back({v, g.ghost});
  }
  finalize(g);
  return g;
}

DualLattice dual_2d(const Lattice& box) {
  if (box.kind != LatticeKind::Box || box.dim() != 2)
    throw std::invalid_argument("dual_2d: 2d free boxes only");
  int w = box.sides[0], h = box.sides[1];
  int fw = w - 1, fh = h - 1;            // inner face grid
  int outer = fw * fh;                   // may be 0 faces + outer only
  auto face_id = [&](int fx, int fy) -> int {
    if (fx < 0 || fx >= fw || fy < 0 || fy >= fh) return outer;
    return fy * fw + fx;
  };
  DualLattice d;
  d.outer = outer;
  d.dual.kind = LatticeKind::Graph;
  d.dual.nv = fw * fh + 1;
  for (int e = 0; e < box.ne(); ++e) {
    auto cu = coord_of(box, box.edges[static_cast<std::size_t>(e)][0]);
    auto cv = coord_of(box, box.edges[static_cast<std::size_t>(e)][1]);
    int fa, fb;
    if (cu[1] == cv[1]) {  // horizontal edge (x,y)-(x+1,y): faces below / above
      int x = std::min(cu[0], cv[0]), y = cu[1];
      fa = face_id(x, y - 1);
      fb = face_id(x, y);
    } else {               // vertical edge (x,y)-(x,y+1): faces left / right
      int x = cu[0], y = std::min(cu[1], cv[1]);
      fa = face_id(x - 1, y);
      fb = face_id(x, y);
    }
    d.dual.edges.push_back({std::min(fa, fb), std::max(fa, fb)});
    d.primal_edge.push_back(e);
  }
  d.dual.adj.assign(static_cast<std::size_t>(d.dual.nv), {});
  for (int e = 0; e < d.dual.ne(); ++e) {
    auto [u, v] = d.dual.edges[static_cast<std::size_t>(e)];
    d.dual.adj[static_cast<std::size_t>(u)].push_back({v, e});
    if (v != u) d.dual.adj[static_cast<std::size_t>(v)].push_back({u, e});
  }
  return d;
}

double hamiltonian(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                   const BoundaryCondition& bc, const SpinConfig& s) {
  if (static_cast<int>(s.size()) != lat.nv) throw std::invalid_argument("hamiltonian: wrong spin count");
  double bond = 0.0;
  for (int e = 0; e < lat.ne(); ++e) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    bond += coup.j(e) * s[static_cast<std::size_t>(u)] * s[static_cast<std::size_t>(v)];
  }
  double site = 0.0;
  bool need_field = !field.zero() || bc.kind != BcKind::Free;
  if (need_field) {
    auto b = exterior_field(lat, bc);
    for (int v = 0; v < lat.nv; ++v)
      site += (field.h(v) + b[static_cast<std::size_t>(v)]) * s[static_cast<std::size_t>(v)];
  }
  return -bond - site;
}

namespace detail {

void even_subgraphs_impl(const Lattice& lat, int max_edges,
                         const std::function<void(std::uint64_t)>& visit) {
  const int E = lat.ne();
  if (E > max_edges) throw std::invalid_argument("even_subgraphs: too many edges");
  // spanning forest + fundamental cycles
  UnionFind uf(lat.nv);
  std::vector<int> tree_edges, cotree_edges;
  for (int e = 0; e < E; ++e) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    if (u != v && uf.unite(u, v))
      tree_edges.push_back(e);
    else
      cotree_edges.push_back(e);  // includes self-loops
  }
  // path-to-root masks within the forest
  std::vector<std::vector<std::pair<int, int>>> tadj(static_cast<std::size_t>(lat.nv));
  for (int e : tree_edges) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    tadj[static_cast<std::size_t>(u)].push_back({v, e});
    tadj[static_cast<std::size_t>(v)].push_back({u, e});
  }
  std::vector<std::uint64_t> path(static_cast<std::size_t>(lat.nv), 0);
  std::vector<char> seen(static_cast<std::size_t>(lat.nv), 0);
  std::vector<int> stack;
  for (int r = 0; r < lat.nv; ++r) {
    if (seen[static_cast<std::size_t>(r)]) continue;
    seen[static_cast<std::size_t>(r)] = 1;
    stack.push_back(r);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (auto [y, e] : tadj[static_cast<std::size_t>(x)]) {
        if (seen[static_cast<std::size_t>(y)]) continue;
        seen[static_cast<std::size_t>(y)] = 1;
        path[static_cast<std::size_t>(y)] = path[static_cast<std::size_t>(x)] ^ (1ull << e);
        stack.push_back(y);
      }
    }
  }
  std::vector<std::uint64_t> cyc;
  for (int e : cotree_edges) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    cyc.push_back(path[static_cast<std::size_t>(u)] ^ path[static_cast<std::size_t>(v)] ^ (1ull << e));
  }
  const int k = static_cast<int>(cyc.size());
  if (k > 26) throw std::invalid_argument("even_subgraphs: cycle space too large");
  std::uint64_t mask = 0;
  visit(mask);
  for (std::uint64_t i = 1; i < (1ull << k); ++i) {
    mask ^= cyc[static_cast<std::size_t>(std::countr_zero(i))];
    visit(mask);
  }
}

}  // namespace detail

std::uint64_t even_subgraph_count(const Lattice& lat) {
  UnionFind uf(lat.nv);
  int tree = 0;
  for (auto [u, v] : lat.edges)
    if (u != v && uf.unite(u, v)) ++tree;
  return 1ull << (lat.ne() - tree);
}

void even_subgraphs(const Lattice& lat, const std::function<void(std::uint64_t)>& visit) {
  detail::even_subgraphs_impl(lat, 24, visit);
}

// ---- text edge-list format -------------------------------------------------

ParsedGraph parse_edge_list(const std::string& text) {
  std::map<long long, int> ids;  // declared vertex id -> declaration slot
  struct RawEdge {
    long long u, v;
    double j;
    int line;
  };
  std::vector<RawEdge> raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw std::runtime_error("edge list line " + std::to_string(lineno) + ": " + msg);
    };
    if (tag == "v") {
      long long id;
      if (!(ls >> id)) fail("expected 'v <id>'");
      if (id < 0) fail("vertex id must be non-negative");
      if (ids.count(id)) fail("duplicate vertex id");
      std::string extra;
      if (ls >> extra) fail("trailing tokens after vertex id");
      ids[id] = 0;
    } else if (tag == "e") {
      long long u, v;
      double j;
      if (!(ls >> u >> v >> j)) fail("expected 'e <u> <v> <J>'");
      if (!std::isfinite(j)) fail("coupling must be finite");
      std::string extra;
      if (ls >> extra) fail("trailing tokens after edge");
      if (u == v) fail("self-loops are not allowed");
      raw.push_back({u, v, j, lineno});
    } else {
      fail("unknown directive '" + tag + "'");
    }
  }
  int next = 0;
  for (auto& [id, slot] : ids) slot = next++;  // std::map iterates in id order
  ParsedGraph g;
  g.lat.kind = LatticeKind::Graph;
  g.lat.nv = next;
  std::vector<std::array<int, 2>> seen_pairs;
  for (const auto& r : raw) {
    auto iu = ids.find(r.u), iv = ids.find(r.v);
    if (iu == ids.end() || iv == ids.end())
      throw std::runtime_error("edge list line " + std::to_string(r.line) + ": endpoint not declared");
    std::array<int, 2> pr{std::min(iu->second, iv->second), std::max(iu->second, iv->second)};
    if (std::find(seen_pairs.begin(), seen_pairs.end(), pr) != seen_pairs.end())
      throw std::runtime_error("edge list line " + std::to_string(r.line) + ": duplicate edge");
    seen_pairs.push_back(pr);
    g.lat.edges.push_back(pr);
    g.coup.per_edge.push_back(r.j);
  }
  g.lat.adj.assign(static_cast<std::size_t>(g.lat.nv), {});
  for (int e = 0; e < g.lat.ne(); ++e) {
    auto [u, v] = g.lat.edges[static_cast<std::size_t>(e)];
    g.lat.adj[static_cast<std::size_t>(u)].push_back({v, e});
    g.lat.adj[static_cast<std::size_t>(v)].push_back({u, e});
  }
  return g;
}

std::string serialize_edge_list(const Lattice& lat, const Coupling& coup) {
  std::ostringstream out;
  for (int v = 0; v < lat.nv; ++v) out << "v " << v << "\n";
  for (int e = 0; e < lat.ne(); ++e) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    out << "e " << u << " " << v << " " << format_g17(coup.j(e)) << "\n";
  }
  return out.str();
}

}  // namespace ising
