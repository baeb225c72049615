#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mmio/builders.hpp"
#include "mmio/cdag.hpp"
#include "mmio/json_io.hpp"

using namespace mmio;

namespace {

Json tiny_meta() {
  Json m;
  m["builder"] = "test";
  m["params"] = Json::object();
  return m;
}

// a, b -> mul -> C(0,0); a also feeds C(0,0) is not allowed (dup edge test separate)
Cdag tiny_graph() {
  DraftCdag d;
  const VertexId a{{}, Role::InputA, {0, 0}};
  const VertexId b{{}, Role::InputB, {0, 0}};
  const VertexId m{{}, Role::Product, {}};
  const VertexId c{{}, Role::DecOut, {0, 0}};
  d.add_vertex(a);
  d.add_vertex(b);
  d.add_vertex(m);
  d.add_vertex(c);
  d.add_edge(a, m);
  d.add_edge(b, m);
  d.add_edge(m, c);
  d.mark_output(c);
  return std::move(d).seal(tiny_meta());
}

}  // namespace

TEST_CASE("seal produces canonical order, CSR and topo") {
  const Cdag g = tiny_graph();
  REQUIRE(g.n_vertices() == 4);
  REQUIRE(g.n_edges() == 3);
  // Canonical order: A, B, mul, C (shortlex path equal; role order).
  CHECK(g.ids[0].role == Role::InputA);
  CHECK(g.ids[1].role == Role::InputB);
  CHECK(g.ids[2].role == Role::Product);
  CHECK(g.ids[3].role == Role::DecOut);
  CHECK(g.inputs == std::vector<int32_t>{0, 1});
  CHECK(g.outputs == std::vector<int32_t>{3});
  CHECK(g.in_degree(2) == 2);
  CHECK(g.out_degree(2) == 1);
  CHECK(g.topo.size() == 4);
  CHECK(g.topo[0] == 0);
  CHECK(g.topo[3] == 3);
  CHECK(g.find(VertexId{{}, Role::Product, {}}) == 2);
  CHECK(g.find(VertexId{{9}, Role::Product, {}}) == -1);
  CHECK_THROWS_AS(g.at(VertexId{{9}, Role::Product, {}}), std::out_of_range);
}

TEST_CASE("seal rejects structural defects") {
  {  // duplicate vertex
    DraftCdag d;
    d.add_vertex(VertexId{{}, Role::InputA, {0, 0}});
    CHECK_THROWS_AS(d.add_vertex(VertexId{{}, Role::InputA, {0, 0}}), std::invalid_argument);
  }
  {  // edge endpoint not declared
    DraftCdag d;
    d.add_vertex(VertexId{{}, Role::InputA, {0, 0}});
    CHECK_THROWS_AS(d.add_edge(VertexId{{}, Role::InputA, {0, 0}},
                               VertexId{{}, Role::Product, {}}),
                    std::invalid_argument);
  }
  {  // duplicate edge
    DraftCdag d;
    const VertexId a{{}, Role::InputA, {0, 0}};
    const VertexId m{{}, Role::Product, {}};
    d.add_vertex(a);
    d.add_vertex(m);
    d.add_edge(a, m);
    d.add_edge(a, m);
    d.mark_output(m);
    CHECK_THROWS_AS(std::move(d).seal(tiny_meta()), std::invalid_argument);
  }
  {  // cycle
    DraftCdag d;
    const VertexId m1{{1}, Role::Product, {}};
    const VertexId m2{{2}, Role::Product, {}};
    d.add_vertex(m1);
    d.add_vertex(m2);
    d.add_edge(m1, m2);
    d.add_edge(m2, m1);
    d.mark_output(m2);
    CHECK_THROWS_AS(std::move(d).seal(tiny_meta()), std::invalid_argument);
  }
  {  // in-degree-0 vertex with non-input role (whole-graph mode)
    DraftCdag d;
    const VertexId m{{}, Role::Product, {}};
    d.add_vertex(m);
    d.mark_output(m);
    CHECK_THROWS_AS(std::move(d).seal(tiny_meta()), std::invalid_argument);
  }
  {  // input with an in-edge
    DraftCdag d;
    const VertexId a{{}, Role::InputA, {0, 0}};
    const VertexId b{{}, Role::InputB, {0, 0}};
    d.add_vertex(a);
    d.add_vertex(b);
    d.add_edge(a, b);
    d.mark_output(b);
    CHECK_THROWS_AS(std::move(d).seal(tiny_meta()), std::invalid_argument);
  }
  {  // no outputs
    DraftCdag d;
    const VertexId a{{}, Role::InputA, {0, 0}};
    const VertexId b{{}, Role::InputB, {0, 0}};
    const VertexId m{{}, Role::Product, {}};
    d.add_vertex(a);
    d.add_vertex(b);
    d.add_vertex(m);
    d.add_edge(a, m);
    d.add_edge(b, m);
    CHECK_THROWS_AS(std::move(d).seal(tiny_meta()), std::invalid_argument);
  }
  {  // empty graph
    DraftCdag d;
    CHECK_THROWS_AS(std::move(d).seal(tiny_meta()), std::invalid_argument);
  }
}

TEST_CASE("H^2 has 29 vertices and 46 edges") {
  const Cdag g = build_strassen(2, false).g;
  CHECK(g.n_vertices() == 29);
  CHECK(g.n_edges() == 46);
  CHECK(g.inputs.size() == 8);
  CHECK(g.outputs.size() == 4);
}

TEST_CASE("induced subgraph keeps inside edges and re-derives io") {
  const Cdag g = build_strassen(2, false).g;
  // Take the product vertices plus the four outputs.
  std::vector<int32_t> members;
  for (int32_t v = 0; v < g.n_vertices(); ++v)
    if (g.roles[v] == Role::Product || g.is_output(v)) members.push_back(v);
  REQUIRE(members.size() == 11);
  const Cdag sub = induced_sub_cdag(g, members);
  CHECK(sub.n_vertices() == 11);
  CHECK(sub.n_edges() == 12);  // decoder edges only
  CHECK(sub.inputs.size() == 7);   // the products become inputs
  CHECK(sub.outputs.size() == 4);  // sinks
  CHECK_THROWS_AS(induced_sub_cdag(g, std::vector<int32_t>{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(induced_sub_cdag(g, std::vector<int32_t>{-1}), std::out_of_range);
}

TEST_CASE("expand_high_fanin folds fan-in-4 into 2-ary chains") {
  const Cdag g = build_strassen(2, false).g;
  const Cdag e = expand_high_fanin(g);
  // H^2: C11 and C22 have fan-in 4 (adds 2 partials each); enc rows are
  // fan-in <= 2 already.
  CHECK(e.n_vertices() == g.n_vertices() + 4);
  for (int32_t v = 0; v < e.n_vertices(); ++v) CHECK(e.in_degree(v) <= 2);
  CHECK(e.outputs.size() == g.outputs.size());
  // Original output ids survive.
  for (const int32_t v : g.outputs) CHECK(e.find(g.ids[v]) >= 0);
  // Meta records the expansion.
  CHECK(e.meta["params"]["expanded"].get<bool>());
  // Idempotent on an already-binary graph.
  const Cdag e2 = expand_high_fanin(e);
  CHECK(e2.n_vertices() == e.n_vertices());
}

TEST_CASE("cdag JSON round-trip preserves structure") {
  const Cdag g = build_strassen(2, false).g;
  const std::string text = to_json_text(g);
  const Cdag h = from_json_text(text);
  CHECK(cdag_equal(g, h));
  CHECK(h.meta["builder"] == "strassen");
  // Round-trip is byte-stable.
  CHECK(to_json_text(h) == text);
}

TEST_CASE("cdag JSON rejects corrupted documents") {
  const Cdag g = build_strassen(1, false).g;
  Json doc = to_json(g);
  {
    Json bad = doc;
    bad["schema"] = "cdag/0";
    CHECK_THROWS_AS(from_json(bad), std::invalid_argument);
  }
  {
    Json bad = doc;
    bad["edges"].push_back(bad["edges"].back());  // duplicate edge
    CHECK_THROWS_AS(from_json(bad), std::invalid_argument);
  }
  {
    Json bad = doc;
    bad.erase("vertices");
    CHECK_THROWS_AS(from_json(bad), std::invalid_argument);
  }
}

TEST_CASE("to_dot emits clusters for a level-1 family") {
  const BuildResult br = build_strassen(4, true);
  const std::string dot = to_dot(br.g, &br.report.families[1]);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("subgraph cluster_0") != std::string::npos);
  CHECK(dot.find("subgraph cluster_6") != std::string::npos);
  const std::string plain = to_dot(br.g, nullptr);
  CHECK(plain.find("subgraph") == std::string::npos);
}
