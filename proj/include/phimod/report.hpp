#pragma once

// JSON renderings of results, and the tree-ball export (DOT or JSON).

#include <sstream>
#include <string>

#include "json.hpp"
#include "phimod/grassman.hpp"
#include "phimod/isom.hpp"
#include "phimod/literal.hpp"
#include "phimod/tree.hpp"

namespace phimod {

using Json = nlohmann::ordered_json;

inline Json to_json(const FieldSpec& f) {
  return Json{{"p", f.p()}, {"r", f.r()}, {"q", f.q()}, {"modulus", f.modulus()}, {"coeff_frobenius", f.coeff_frobenius()}};
}

inline Json to_json(const SeriesMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.d(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.d(); ++j) row.push_back(format_series(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Coweight& c) { return Json(c.components()); }

inline Json to_json(const Lattice& L) {
  return Json{{"basis", to_json(L.basis())}, {"diagonal", L.diagonal()}, {"detval", L.detval()}};
}

inline Json to_json(const KisinReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back(Json{{"lattice", to_json(p.lattice)}, {"type", to_json(p.type)}});
  Json out{{"kind", r.kind}};
  out["nu"] = r.nu ? to_json(*r.nu) : Json(nullptr);
  if (r.kind == "flat") out["e"] = r.e;
  out["ext"] = r.ext;
  out["field"] = to_json(r.field);
  out["box"] = r.box;
  out["detvals"] = r.detvals;
  out["candidates"] = r.candidates;
  out["count"] = r.count();
  out["points"] = std::move(pts);
  return out;
}

inline Json to_json(const IsomReport& r) {
  Json out{{"verdict", verdict_name(r.verdict)}};
  out["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  out["detail"] = r.detail;
  out["residual_prec"] = r.residual_prec;
  out["pole_bound"] = r.pole_bound;
  out["solution_dim"] = r.solution_dim;
  out["candidates_tried"] = r.candidates_tried;
  out["exhaustive"] = r.exhaustive;
  return out;
}

inline Json to_json(const ConjSolution& s) {
  Json trace = Json::array();
  for (const auto& it : s.trace)
    trace.push_back(Json{{"index", it.index}, {"kappa", it.kappa}, {"level", it.level}, {"certified", it.certified}});
  return Json{{"g", to_json(s.g)}, {"m", s.m}, {"trace", std::move(trace)}};
}

inline Json to_json(const TreeClassification& c) {
  Json out{{"case", case_name(c.tree_case)}, {"module_type", module_type_name(c.module_type)}, {"m_min", c.scan.m_min}};
  out["minimizer"] = to_json(c.scan.x_star.rep());
  out["scan_radius"] = c.scan.radius;
  out["scanned"] = c.scan.ball.size();
  out["fixed_vertex"] = c.fixed_vertex ? to_json(c.fixed_vertex->rep()) : Json(nullptr);
  out["s"] = c.s ? Json(*c.s) : Json(nullptr);
  out["link_fixed_count"] = c.link_fixed_count ? Json(*c.link_fixed_count) : Json(nullptr);
  if (c.rank_one) {
    Json lines = Json::array();
    for (const auto& L : c.rank_one->lines)
      lines.push_back(Json{{"v", {format_series(L.v[0]), format_series(L.v[1])}},
                           {"lambda", format_series(L.lambda)},
                           {"certified", L.certified}});
    out["rank_one"] = Json{{"lines", std::move(lines)},
                           {"window", {c.rank_one->window_lo, c.rank_one->window_hi}},
                           {"complete", c.rank_one->complete},
                           {"nodes", c.rank_one->nodes}};
  } else {
    out["rank_one"] = nullptr;
  }
  return out;
}

enum class ExportFormat { Dot, Json };

struct ExportOptions {
  std::optional<Exp> threshold;  // flag vertices with d(x, Phi x) <= threshold
  bool classification = true;
  double limit = 1e6;
  int jobs = 1;
};

/// The ball of the given radius around `center`, with d(x, Phi x) on each vertex.
inline std::string export_ball(const SeriesMatrix& A, const TreeVertex& center, Exp radius, ExportFormat format,
                               const ExportOptions& opt = {}) {
  const auto entries = ball(center, radius, opt.limit);
  std::vector<Exp> disp(entries.size());
  detail::parallel_for(entries.size(), opt.jobs, [&](std::size_t i) { disp[i] = displacement(A, entries[i].vertex); });
  auto within = [&](std::size_t i) { return opt.threshold && disp[i] <= *opt.threshold; };

  if (format == ExportFormat::Dot) {
    std::ostringstream out;
    out << "graph tree {\n  node [shape=circle];\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << "  v" << i << " [label=\"" << entries[i].distance << " / " << disp[i] << "\"";
      if (i == 0) out << ", shape=doublecircle";
      if (within(i)) out << ", style=filled, fillcolor=lightblue";
      out << "];\n";
    }
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].parent) out << "  v" << *entries[i].parent << " -- v" << i << ";\n";
    out << "}\n";
    return out.str();
  }

  Json vertices = Json::array(), edges = Json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Json v{{"id", i},
           {"rep", to_json(entries[i].vertex.rep().basis())},
           {"detval", entries[i].vertex.detval()},
           {"distance", entries[i].distance},
           {"displacement", disp[i]}};
    if (opt.threshold) v["within_threshold"] = within(i);
    vertices.push_back(std::move(v));
    if (entries[i].parent) edges.push_back({*entries[i].parent, i});
  }
  Json out{{"field", to_json(A.field())}, {"radius", radius}, {"count", entries.size()}};
  out["threshold"] = opt.threshold ? Json(*opt.threshold) : Json(nullptr);
  out["vertices"] = std::move(vertices);
  out["edges"] = std::move(edges);
  out["classification"] = opt.classification ? to_json(classify(A, {}, opt.limit, opt.jobs)) : Json(nullptr);
  return out.dump(2) + "\n";
}

}  // namespace phimod
