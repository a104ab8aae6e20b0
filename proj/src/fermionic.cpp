#include "ising/fermionic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ising/common.hpp"
#include "ising/exact.hpp"

namespace ising {

ComplexLatticeFunction tabulate_function(
    int lx, int ly, const std::function<std::complex<double>(std::complex<double>)>& f) {
  if (lx < 1 || ly < 1) throw std::invalid_argument("box sides must be positive");
  ComplexLatticeFunction out;
  out.lx = lx;
  out.ly = ly;
  out.values.resize(static_cast<std::size_t>(lx) * static_cast<std::size_t>(ly));
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      out.values[static_cast<std::size_t>(y) * static_cast<std::size_t>(lx) +
                 static_cast<std::size_t>(x)] =
          f(std::complex<double>(static_cast<double>(x), static_cast<double>(y)));
    }
  }
  return out;
}

std::complex<double> isaacs_residual(const ComplexLatticeFunction& f, int fx, int fy) {
  if (fx < 0 || fy < 0 || fx + 1 >= f.lx || fy + 1 >= f.ly) {
    throw std::invalid_argument("face corners missing from the domain");
  }
  const std::complex<double> nw = f.at(fx, fy + 1);
  const std::complex<double> ne = f.at(fx + 1, fy + 1);
  const std::complex<double> sw = f.at(fx, fy);
  const std::complex<double> se = f.at(fx + 1, fy);
  return nw - se - std::complex<double>(0.0, 1.0) * (ne - sw);
}

double preholomorphic_check(const ComplexLatticeFunction& f) {
  double worst = 0.0;
  for (int fy = 0; fy + 1 < f.ly; ++fy) {
    for (int fx = 0; fx + 1 < f.lx; ++fx) {
      worst = std::max(worst, std::abs(isaacs_residual(f, fx, fy)));
    }
  }
  return worst;
}

namespace {

int face_vertex(const Lattice& box, int x, int y) { return vertex_at(box, {x, y}); }

}  // namespace

void validate_cut(const Lattice& box, const Cut& cut) {
  if (box.kind != LatticeKind::Box || box.dim() != 2) {
    throw std::invalid_argument("cuts are defined on 2d free boxes");
  }
  const DualLattice d = dual_2d(box);
  const int fw = box.sides[0] - 1;
  const int fh = box.sides[1] - 1;
  if (cut.target_fx < 0 || cut.target_fx >= fw || cut.target_fy < 0 || cut.target_fy >= fh) {
    throw std::invalid_argument("cut target face outside the domain");
  }
  const int target = cut.target_fy * fw + cut.target_fx;
  if (cut.primal_edges.empty()) throw std::invalid_argument("cut has no edges");
  // primal edge -> dual edge (dual edges are built in primal order, but map
  // defensively through primal_edge anyway)
  std::vector<int> dual_of(static_cast<std::size_t>(box.ne()), -1);
  for (int de = 0; de < d.dual.ne(); ++de) {
    dual_of[static_cast<std::size_t>(d.primal_edge[static_cast<std::size_t>(de)])] = de;
  }
  int at = d.outer;
  std::set<int> visited = {at};
  for (std::size_t i = 0; i < cut.primal_edges.size(); ++i) {
    const int pe = cut.primal_edges[i];
    if (pe < 0 || pe >= box.ne()) throw std::invalid_argument("cut edge id out of range");
    const int de = dual_of[static_cast<std::size_t>(pe)];
    const auto [a, b] = d.dual.edges[static_cast<std::size_t>(de)];
    int next;
    if (a == at) {
      next = b;
    } else if (b == at) {
      next = a;
    } else {
      throw std::invalid_argument("cut edges do not form a dual path");
    }
    if (!visited.insert(next).second) {
      throw std::invalid_argument("cut path revisits a face");
    }
    at = next;
  }
  if (at != target) throw std::invalid_argument("cut path does not end at the target face");
}

Cut straight_cut(const Lattice& box, int fx, int fy) {
  if (box.kind != LatticeKind::Box || box.dim() != 2) {
    throw std::invalid_argument("cuts are defined on 2d free boxes");
  }
  Cut cut;
  cut.target_fx = fx;
  cut.target_fy = fy;
  for (int y = 0; y <= fy; ++y) {
    const int u = face_vertex(box, fx, y);
    const int v = face_vertex(box, fx + 1, y);
    int edge = -1;
    for (auto [w, e] : box.adj[static_cast<std::size_t>(u)]) {
      if (w == v) {
        edge = e;
        break;
      }
    }
    if (edge < 0) throw std::invalid_argument("straight cut crossed a missing edge");
    cut.primal_edges.push_back(edge);
  }
  validate_cut(box, cut);
  return cut;
}

namespace {

// shared validation: pairwise-disjoint cuts, spin points bordering targets
std::vector<int> collect_cut_edges(const Lattice& box, const std::vector<Insertion>& ins) {
  std::set<int> seen;
  std::vector<int> edges;
  for (const auto& in : ins) {
    validate_cut(box, in.cut);
    if (in.x < 0 || in.x >= box.nv) throw std::invalid_argument("spin vertex out of range");
    const auto c = coord_of(box, in.x);
    const bool borders = (c[0] == in.cut.target_fx || c[0] == in.cut.target_fx + 1) &&
                         (c[1] == in.cut.target_fy || c[1] == in.cut.target_fy + 1);
    if (!borders) throw std::invalid_argument("spin vertex does not border the cut target face");
    for (int e : in.cut.primal_edges) {
      if (!seen.insert(e).second) throw std::invalid_argument("cuts overlap");
      edges.push_back(e);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

double order_disorder_correlator(const Lattice& box, double beta,
                                 const std::vector<Insertion>& ins) {
  if (box.nv > 20) throw std::invalid_argument("order-disorder enumeration capped at 2^20");
  if (!(beta >= 0.0)) throw std::invalid_argument("order-disorder needs beta >= 0");
  const std::vector<int> cut_edges = collect_cut_edges(box, ins);
  std::vector<std::uint8_t> is_cut(static_cast<std::size_t>(box.ne()), 0);
  for (int e : cut_edges) is_cut[static_cast<std::size_t>(e)] = 1;
  KahanSum num, den;
  const std::uint32_t total = 1u << box.nv;
  for (std::uint32_t m = 0; m < total; ++m) {
    auto spin = [&](int v) { return (m >> v & 1) ? 1.0 : -1.0; };
    double inter = 0.0;   // sum over edges of s s (unit couplings)
    double cut_ss = 0.0;  // the same restricted to cut edges
    for (int e = 0; e < box.ne(); ++e) {
      const auto [u, v] = box.edges[static_cast<std::size_t>(e)];
      const double ss = spin(u) * spin(v);
      inter += ss;
      if (is_cut[static_cast<std::size_t>(e)]) cut_ss += ss;
    }
    // weight relative to the maximal interaction keeps the sums in range
    const double w = std::exp(beta * (inter - box.ne()));
    double obs = 1.0;
    for (const auto& in : ins) obs *= spin(in.x);
    obs *= std::exp(-2.0 * beta * cut_ss);
    num.add(obs * w);
    den.add(w);
  }
  return num.value() / den.value();
}

double order_disorder_negated(const Lattice& box, double beta, const std::vector<Insertion>& ins) {
  if (box.nv > 20) throw std::invalid_argument("order-disorder enumeration capped at 2^20");
  if (!(beta >= 0.0)) throw std::invalid_argument("order-disorder needs beta >= 0");
  const std::vector<int> cut_edges = collect_cut_edges(box, ins);
  Coupling neg;
  neg.per_edge.assign(static_cast<std::size_t>(box.ne()), 1.0);
  for (int e : cut_edges) neg.per_edge[static_cast<std::size_t>(e)] = -1.0;
  const Coupling unit;
  const FieldSpec no_field;
  const BoundaryCondition free_bc;
  const double log_z_neg = log_partition_enumerate(box, neg, no_field, free_bc, beta);
  const double log_z = log_partition_enumerate(box, unit, no_field, free_bc, beta);
  std::vector<int> xs;
  for (const auto& in : ins) xs.push_back(in.x);
  double corr = 1.0;
  if (!xs.empty()) corr = exact_correlation(box, neg, no_field, free_bc, beta, xs);
  return std::exp(log_z_neg - log_z) * corr;
}

double cut_deformation_check(const Lattice& box, double beta, const std::vector<Insertion>& a,
                             const std::vector<Insertion>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cut systems differ in insertion count");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x || a[i].cut.target_fx != b[i].cut.target_fx ||
        a[i].cut.target_fy != b[i].cut.target_fy) {
      throw std::invalid_argument("cut systems must share spin points and target faces");
    }
  }
  return std::abs(order_disorder_correlator(box, beta, a) -
                  order_disorder_correlator(box, beta, b));
}

}  // namespace ising
