#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ising/common.hpp"
#include "ising/lattice.hpp"
#include "ising/rng.hpp"

using namespace ising;

TEST_CASE("box lattice geometry") {
  Lattice b = make_box({3, 2});
  CHECK_EQ(b.nv, 6);
  CHECK_EQ(b.ne(), 7);  // 4 horizontal + 3 vertical
  CHECK_FALSE(b.periodic());
  CHECK_EQ(b.dim(), 2);
  // row-major with axis 0 fastest
  CHECK_EQ(vertex_at(b, {1, 1}), 4);
  CHECK_EQ(coord_of(b, 5), std::vector<int>{2, 1});
  for (auto [u, v] : b.edges) CHECK_LT(u, v);
  // adjacency entries point back at their edge
  for (int v = 0; v < b.nv; ++v)
    for (auto [nbr, e] : b.adj[static_cast<std::size_t>(v)]) {
      auto [a, c] = b.edges[static_cast<std::size_t>(e)];
      CHECK((a == v || c == v));
      CHECK((a == nbr || c == nbr));
      CHECK_NE(nbr, v);
    }
}

TEST_CASE("torus lattice geometry") {
  Lattice t = make_torus({3, 3});
  CHECK_EQ(t.nv, 9);
  CHECK_EQ(t.ne(), 18);
  CHECK(t.periodic());
  for (int v = 0; v < t.nv; ++v) CHECK_EQ(t.adj[static_cast<std::size_t>(v)].size(), 4u);
  CHECK_THROWS_AS(make_torus({2, 2}), std::invalid_argument);
}

TEST_CASE("path and ring") {
  Lattice p = make_path(4);
  CHECK_EQ(p.nv, 4);
  CHECK_EQ(p.ne(), 3);
  Lattice r = make_ring(5);
  CHECK_EQ(r.nv, 5);
  CHECK_EQ(r.ne(), 5);
  for (int v = 0; v < r.nv; ++v) CHECK_EQ(r.adj[static_cast<std::size_t>(v)].size(), 2u);
}

TEST_CASE("explicit graph keeps edge order") {
  Lattice g = make_graph(4, {{2, 0}, {1, 3}, {0, 1}});
  CHECK_EQ(g.ne(), 3);
  CHECK_EQ(g.edges[0], std::array<int, 2>{0, 2});
  CHECK_EQ(g.edges[1], std::array<int, 2>{1, 3});
  CHECK_EQ(g.edges[2], std::array<int, 2>{0, 1});
  CHECK_THROWS_AS(make_graph(2, {{0, 0}}), std::invalid_argument);
}

TEST_CASE("edge list text round trip") {
  std::string text =
      "# small weighted graph\n"
      "v 0\nv 1\nv 2\n"
      "e 0 1 1.5\n"
      "e 1 2 0.25\n";
  ParsedGraph g = parse_edge_list(text);
  CHECK_EQ(g.lat.nv, 3);
  CHECK_EQ(g.lat.ne(), 2);
  CHECK_EQ(g.coup.j(0), doctest::Approx(1.5).epsilon(1e-15));
  CHECK_EQ(g.coup.j(1), doctest::Approx(0.25).epsilon(1e-15));
  ParsedGraph h = parse_edge_list(serialize_edge_list(g.lat, g.coup));
  CHECK_EQ(h.lat.nv, g.lat.nv);
  REQUIRE_EQ(h.lat.ne(), g.lat.ne());
  for (int e = 0; e < g.lat.ne(); ++e) {
    CHECK_EQ(h.lat.edges[static_cast<std::size_t>(e)], g.lat.edges[static_cast<std::size_t>(e)]);
    CHECK_EQ(h.coup.j(e), doctest::Approx(g.coup.j(e)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(parse_edge_list("z 0 1\n"), std::runtime_error);
}

TEST_CASE("planar dual of a 3x3 box") {
  Lattice b = make_box({3, 3});
  DualLattice d = dual_2d(b);
  CHECK_EQ(d.dual.nv, 5);  // 4 inner faces + outer
  CHECK_EQ(d.outer, 4);
  REQUIRE_EQ(d.dual.ne(), b.ne());
  for (int e = 0; e < b.ne(); ++e) CHECK_EQ(d.primal_edge[static_cast<std::size_t>(e)], e);
  // the outer face borders every perimeter edge
  CHECK_EQ(d.dual.adj[static_cast<std::size_t>(d.outer)].size(), 8u);
}

TEST_CASE("even subgraph enumeration") {
  CHECK_EQ(even_subgraph_count(make_path(5)), 1u);
  CHECK_EQ(even_subgraph_count(make_ring(5)), 2u);
  Lattice b = make_box({3, 3});
  CHECK_EQ(even_subgraph_count(b), 16u);
  std::set<std::uint64_t> seen;
  even_subgraphs(b, [&](std::uint64_t mask) {
    CHECK(seen.insert(mask).second);
    std::vector<int> deg(static_cast<std::size_t>(b.nv), 0);
    for (int e = 0; e < b.ne(); ++e)
      if (mask & (1ull << e)) {
        ++deg[static_cast<std::size_t>(b.edges[static_cast<std::size_t>(e)][0])];
        ++deg[static_cast<std::size_t>(b.edges[static_cast<std::size_t>(e)][1])];
      }
    for (int x : deg) CHECK_EQ(x % 2, 0);
  });
  CHECK_EQ(seen.size(), 16u);
}

TEST_CASE("hamiltonian with fields and boundary terms") {
  Lattice b = make_box({2, 2});
  Coupling j;
  FieldSpec h;
  BoundaryCondition free_bc;
  SpinConfig up(4, +1);
  CHECK_EQ(hamiltonian(b, j, h, free_bc, up), doctest::Approx(-4.0).epsilon(1e-15));
  h.uniform = 0.25;
  CHECK_EQ(hamiltonian(b, j, h, free_bc, up), doctest::Approx(-5.0).epsilon(1e-15));
  h.uniform = 0.0;
  BoundaryCondition plus;
  plus.kind = BcKind::Plus;
  // every vertex of the 2x2 box has two exterior neighbours
  auto deg = exterior_degree(b);
  for (int x : deg) CHECK_EQ(x, 2);
  CHECK_EQ(hamiltonian(b, j, h, plus, up), doctest::Approx(-12.0).epsilon(1e-15));
  SpinConfig down(4, -1);
  BoundaryCondition minus;
  minus.kind = BcKind::Minus;
  CHECK_EQ(hamiltonian(b, j, h, minus, down), doctest::Approx(-12.0).epsilon(1e-15));
}

TEST_CASE("boundary helpers") {
  Lattice b = make_box({3, 3});
  auto bd = boundary_vertices(b);
  CHECK_EQ(bd.size(), 8u);
  for (int v : bd) CHECK_NE(v, 4);
  auto ext = exterior_sites(b);
  CHECK_EQ(ext.size(), 12u);  // 4 sides x 3 sites
  for (const auto& s : ext) CHECK_EQ(s.size(), 2u);
  Lattice g = ghost_augment(b, bd);
  CHECK_EQ(g.nv, 10);
  CHECK_EQ(g.ghost, 9);
  CHECK_EQ(g.ne(), b.ne() + 8);
  // ghost edges come last, in attach order
  for (std::size_t i = 0; i < bd.size(); ++i) {
    auto e = g.edges[static_cast<std::size_t>(b.ne()) + i];
    CHECK_EQ(e[0], bd[i]);
    CHECK_EQ(e[1], 9);
  }
}

TEST_CASE("dobrushin boundary field splits along the last axis") {
  Lattice b = make_box({3, 3});
  BoundaryCondition dob;
  dob.kind = BcKind::Dobrushin;
  dob.axis = 1;
  dob.level = 2;  // tau = +1 iff y >= 2
  auto f = exterior_field(b, dob);
  // bottom-left corner: exterior neighbours at (-1,0) and (0,-1), both minus
  CHECK_EQ(f[0], doctest::Approx(-2.0).epsilon(1e-15));
  // top-left corner: exterior at (-1,2) and (0,3), both plus
  CHECK_EQ(f[static_cast<std::size_t>(vertex_at(b, {0, 2}))], doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("deterministic counter rng") {
  CHECK_EQ(rng_word(7, 1, 2, 3), rng_word(7, 1, 2, 3));
  CHECK_NE(rng_word(7, 1, 2, 3), rng_word(7, 2, 2, 3));
  CHECK_NE(rng_word(7, 1, 2, 3), rng_word(8, 1, 2, 3));
  SequenceRng a(42, 5), b(42, 5);
  for (int i = 0; i < 100; ++i) {
    double u = a.uniform();
    CHECK_EQ(u, b.uniform());
    CHECK_GE(u, 0.0);
    CHECK_LT(u, 1.0);
  }
  SequenceRng c(42, 5);
  for (int i = 0; i < 50; ++i) {
    std::uint64_t k = c.below(6);
    CHECK_LT(k, 6u);
  }
}

TEST_CASE("statistics helpers") {
  KahanSum s;
  for (int i = 0; i < 10; ++i) s.add(0.1);
  CHECK_EQ(s.value(), doctest::Approx(1.0).epsilon(1e-15));

  UnionFind uf(4);
  CHECK(uf.unite(0, 1));
  CHECK(uf.unite(2, 3));
  CHECK_FALSE(uf.unite(1, 0));
  CHECK_EQ(uf.find(0), uf.find(1));
  CHECK_NE(uf.find(0), uf.find(2));

  std::vector<double> flat(64, 2.5);
  BinStats bs = binned_stats(flat, 8);
  CHECK_EQ(bs.mean, doctest::Approx(2.5).epsilon(1e-15));
  CHECK_EQ(bs.err, doctest::Approx(0.0).epsilon(1e-15));

  // exact line is recovered exactly
  std::vector<double> x{1, 2, 3, 4}, y, w(4, 1.0);
  for (double xi : x) y.push_back(3.0 * xi - 1.0);
  LinearFit lf = weighted_linear_fit(x, y, w);
  CHECK_EQ(lf.slope, doctest::Approx(3.0).epsilon(1e-12));
  CHECK_EQ(lf.intercept, doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_GE(lf.r2, 1.0 - 1e-12);

  std::vector<std::vector<double>> bins{{1.0}, {2.0}, {3.0}, {4.0}};
  JackknifeResult jk = jackknife_bins(bins, [](const std::vector<double>& m) { return m[0]; });
  CHECK_EQ(jk.value, doctest::Approx(2.5).epsilon(1e-12));
  CHECK_GT(jk.err, 0.0);

  CHECK_EQ(chi2_sf(0.0, 3), doctest::Approx(1.0).epsilon(1e-12));
  CHECK_LT(chi2_sf(30.0, 3), 2e-6);
}

TEST_CASE("thread resolution order") {
  CHECK_EQ(resolve_threads(3), 3);
  ::unsetenv("ISING_LAB_THREADS");
  CHECK_EQ(resolve_threads(0), 1);
  ::setenv("ISING_LAB_THREADS", "5", 1);
  CHECK_EQ(resolve_threads(0), 5);
  CHECK_EQ(resolve_threads(2), 2);
  ::unsetenv("ISING_LAB_THREADS");
}

TEST_CASE("chunked map sums agree across thread counts") {
  auto work = [](std::uint64_t lo, std::uint64_t hi) {
    double s = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) s += static_cast<double>(i);
    return s;
  };
  auto total = [&](int threads) {
    auto parts = map_chunks<double>(1000, 64, threads, work);
    KahanSum s;
    for (double p : parts) s.add(p);
    return s.value();
  };
  CHECK_EQ(total(1), doctest::Approx(499500.0).epsilon(1e-15));
  CHECK_EQ(total(4), doctest::Approx(499500.0).epsilon(1e-15));
}
