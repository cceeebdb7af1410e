#include "canheight/canheight.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <new>
#include <sstream>

#include "divergence/tower.hpp"
#include "equidist/averages.hpp"
#include "exact/error.hpp"
#include "exact/serialize.hpp"

using namespace canheight;

struct ch_context {
  EquidistOptions opt;
  double tol = 1e-9;
  std::string last_error;

  ch_context() { opt.height.tol = tol; }
  int digits() const { return std::max(17, static_cast<int>(std::floor(opt.height.bits * 0.30102999566398120))); }
};

struct ch_map {
  RationalMap map;
};

struct ch_poly {
  PolyQ poly;
};

namespace {

ch_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input:
      return CH_INVALID_INPUT;
    case ErrorKind::DegenerateMap:
      return CH_DEGENERATE_MAP;
    case ErrorKind::ExceptionalTarget:
      return CH_EXCEPTIONAL_TARGET;
    case ErrorKind::Budget:
      return CH_BUDGET_EXCEEDED;
    case ErrorKind::Precision:
      return CH_PRECISION_LOSS;
    default:
      return CH_COMPUTATION_FAILED;
  }
}

ch_status guarded(ch_context* ctx, const std::function<void()>& body) {
  if (!ctx) return CH_INVALID_INPUT;
  ctx->last_error.clear();
  try {
    body();
    return CH_OK;
  } catch (const Error& e) {
    ctx->last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    ctx->last_error = "out of memory";
    return CH_BUDGET_EXCEEDED;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return CH_INTERNAL_ERROR;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const Json& j) {
  if (!out) fail(ErrorKind::Input, "output pointer is null");
  *out = dup_string(j.dump());
}

std::string text(const char* s, const char* what) {
  if (!s) fail(ErrorKind::Input, std::string(what) + " is missing");
  return s;
}

const RationalMap& map_of(const ch_map* m) {
  if (!m) fail(ErrorKind::Input, "map is missing");
  return m->map;
}

const PolyQ& poly_of(const ch_poly* p) {
  if (!p) fail(ErrorKind::Input, "polynomial is missing");
  return p->poly;
}

Json real(const ch_context* ctx, const Real& x) { return x.to_string(ctx->digits()); }

Json local_json(const ch_context* ctx, const LocalHeight& h) {
  Json j;
  j["place"] = h.place.label();
  j["value"] = real(ctx, h.value);
  if (!h.place.is_infinity()) j["log_p_coeff"] = rat_to_json(h.log_p_coeff);
  j["k_used"] = h.k_used;
  j["precision_bits"] = h.bits;
  j["error_estimate"] = real(ctx, h.error);
  j["approximate"] = h.approximate;
  if (h.aggregated) j["aggregated"] = true;
  return j;
}

Json height_json(const ch_context* ctx, const HeightResult& h) {
  Json j;
  j["value"] = real(ctx, h.value);
  Json places = Json::object();
  for (const auto& l : h.per_place) places[l.place.label()] = real(ctx, l.value);
  j["per_place"] = places;
  j["k_used"] = h.k_used;
  j["precision_bits"] = h.precision_bits;
  j["error_estimate"] = real(ctx, h.error_estimate);
  j["approximate"] = h.approximate;
  if (h.direct) j["direct"] = {{"k", h.direct->k}, {"value", real(ctx, h.direct->value)}};
  return j;
}

Json average_json(const ch_context* ctx, const Place& v, unsigned long k, const AverageValue& a) {
  Json j;
  j["k"] = k;
  j["place"] = v.label();
  j["value"] = real(ctx, a.value);
  if (!v.is_infinity()) j["log_p_coeff"] = rat_to_json(a.log_p_coeff);
  j["mode"] = to_string(a.mode_used);
  j["removed_degree"] = a.removed_degree;
  j["fell_back"] = a.fell_back;
  j["precision_bits"] = a.bits;
  return j;
}

Json row_json(const ch_context* ctx, const SeriesRow& r) {
  Json j;
  j["k"] = r.k;
  j["value"] = real(ctx, r.value);
  j["delta"] = r.delta ? real(ctx, *r.delta) : Json();
  j["mode"] = to_string(r.mode_used);
  j["fell_back"] = r.fell_back;
  return j;
}

Json series_json(const ch_context* ctx, const ConvergenceSeries& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) rows.push_back(row_json(ctx, r));
  return {{"rows", rows}, {"limit_estimate", real(ctx, s.limit_estimate)}, {"converged", s.converged}};
}

RowCallback forward(const ch_context* ctx, ch_row_callback cb, void* user) {
  if (!cb) return {};
  return [ctx, cb, user](const SeriesRow& r) { cb(row_json(ctx, r).dump().c_str(), user); };
}

HeightOptions height_opt(const ch_context* ctx) { return ctx->opt.height; }

}  // namespace

extern "C" {

int ch_status_is_input_error(ch_status s) { return s == CH_INVALID_INPUT || s == CH_DEGENERATE_MAP; }

const char* ch_status_name(ch_status s) {
  switch (s) {
    case CH_OK:
      return "ok";
    case CH_INVALID_INPUT:
      return "invalid input";
    case CH_DEGENERATE_MAP:
      return "degenerate map";
    case CH_EXCEPTIONAL_TARGET:
      return "exceptional target";
    case CH_BUDGET_EXCEEDED:
      return "budget exceeded";
    case CH_PRECISION_LOSS:
      return "precision loss";
    case CH_COMPUTATION_FAILED:
      return "computation failed";
    default:
      return "internal error";
  }
}

ch_context* ch_context_new(void) { return new (std::nothrow) ch_context(); }

void ch_context_free(ch_context* ctx) { delete ctx; }

const char* ch_context_last_error(const ch_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

ch_status ch_context_set_precision(ch_context* ctx, unsigned long bits) {
  return guarded(ctx, [&] {
    if (bits < 64) fail(ErrorKind::Input, "precision must be at least 64 bits");
    ctx->opt.height.bits = static_cast<mpfr_prec_t>(bits);
    ctx->opt.height.max_bits = std::max<mpfr_prec_t>(ctx->opt.height.max_bits, 4 * ctx->opt.height.bits);
  });
}

ch_status ch_context_set_tolerance(ch_context* ctx, double tol) {
  return guarded(ctx, [&] {
    if (!(tol > 0) || !std::isfinite(tol)) fail(ErrorKind::Input, "tolerance must be positive");
    ctx->tol = tol;
    ctx->opt.height.tol = tol;
  });
}

ch_status ch_context_set_degree_cap(ch_context* ctx, unsigned long cap) {
  return guarded(ctx, [&] {
    if (cap < 2) fail(ErrorKind::Input, "degree cap must be at least 2");
    ctx->opt.caps.poly_degree = cap;
  });
}

ch_status ch_context_set_norm(ch_context* ctx, const char* norm) {
  return guarded(ctx, [&] {
    const std::string n = text(norm, "norm");
    if (n == "max")
      ctx->opt.height.norm = Norm::Max;
    else if (n == "fubini-study")
      ctx->opt.height.norm = Norm::FubiniStudy;
    else
      fail(ErrorKind::Input, "norm must be max or fubini-study, got '" + n + "'");
  });
}

void ch_string_free(char* s) { std::free(s); }

ch_status ch_map_from_json(ch_context* ctx, const char* json, ch_map** out) {
  return guarded(ctx, [&] {
    if (!out) fail(ErrorKind::Input, "output pointer is null");
    *out = new ch_map{RationalMap::from_json(parse_json(text(json, "map JSON")))};
  });
}

ch_status ch_map_from_file(ch_context* ctx, const char* path, ch_map** out) {
  return guarded(ctx, [&] {
    if (!out) fail(ErrorKind::Input, "output pointer is null");
    const std::string p = text(path, "map path");
    std::ifstream in(p);
    if (!in) fail(ErrorKind::Input, "cannot read map file '" + p + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    *out = new ch_map{RationalMap::from_json(parse_json(buf.str()))};
  });
}

void ch_map_free(ch_map* map) { delete map; }

ch_status ch_map_describe(ch_context* ctx, const ch_map* map, char** out) {
  return guarded(ctx, [&] {
    const RationalMap& m = map_of(map);
    Json j = m.to_json();
    Json primes = Json::array();
    for (const Int& p : bad_primes(m)) primes.push_back(canheight::to_string(p));
    j["bad_primes"] = primes;
    emit(out, j);
  });
}

ch_status ch_poly_parse(ch_context* ctx, const char* s, ch_poly** out) {
  return guarded(ctx, [&] {
    if (!out) fail(ErrorKind::Input, "output pointer is null");
    const std::string t = text(s, "polynomial");
    std::vector<Rat> c;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      c.push_back(parse_rational(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    PolyQ p(std::move(c));
    if (p.is_zero()) fail(ErrorKind::Input, "polynomial must be nonzero");
    *out = new ch_poly{std::move(p)};
  });
}

void ch_poly_free(ch_poly* poly) { delete poly; }

ch_status ch_height(ch_context* ctx, const ch_map* map, const char* point, char** out) {
  return guarded(ctx, [&] {
    const ProjPoint x = parse_point(text(point, "point"));
    Json j = height_json(ctx, canonical_height(map_of(map), x, height_opt(ctx)));
    j["point"] = to_string(x);
    emit(out, j);
  });
}

ch_status ch_height_algebraic(ch_context* ctx, const ch_map* map, const ch_poly* f, char** out) {
  return guarded(ctx, [&] {
    Json j = height_json(ctx, canonical_height_algebraic(map_of(map), poly_of(f), height_opt(ctx)));
    j["poly"] = poly_to_json(poly_of(f));
    emit(out, j);
  });
}

ch_status ch_local_height(ch_context* ctx, const ch_map* map, const char* point, const char* place, char** out) {
  return guarded(ctx, [&] {
    const ProjPoint x = parse_point(text(point, "point"));
    const Place v = parse_place(text(place, "place"));
    emit(out, local_json(ctx, local_canonical_height(map_of(map), x, v, height_opt(ctx))));
  });
}

ch_status ch_functional_residual(ch_context* ctx, const ch_map* map, const char* point, const char* place,
                                 char** out) {
  return guarded(ctx, [&] {
    const ProjPoint x = parse_point(text(point, "point"));
    const Place v = parse_place(text(place, "place"));
    emit(out, local_json(ctx, functional_eq_residual(map_of(map), x, v, height_opt(ctx))));
  });
}

ch_status ch_mahler(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* place, char** out) {
  return guarded(ctx, [&] {
    const Place v = parse_place(text(place, "place"));
    emit(out, local_json(ctx, mahler_measure(map_of(map), poly_of(f), v, height_opt(ctx))));
  });
}

ch_status ch_periodic_average(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* place,
                              unsigned long k, const char* mode, char** out) {
  return guarded(ctx, [&] {
    const Place v = parse_place(text(place, "place"));
    const Mode m = parse_mode(text(mode, "mode"));
    emit(out, average_json(ctx, v, k, periodic_average(map_of(map), poly_of(f), v, k, m, ctx->opt)));
  });
}

ch_status ch_preimage_average(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* alpha,
                              const char* place, unsigned long k, const char* mode, char** out) {
  return guarded(ctx, [&] {
    const ProjPoint a = parse_point(text(alpha, "alpha"));
    const Place v = parse_place(text(place, "place"));
    const Mode m = parse_mode(text(mode, "mode"));
    emit(out, average_json(ctx, v, k, preimage_average(map_of(map), poly_of(f), a, v, k, m, ctx->opt)));
  });
}

ch_status ch_average_series(ch_context* ctx, const ch_map* map, const ch_poly* f, const char* place,
                            const char* alpha, unsigned long kmin, unsigned long kmax, const char* mode,
                            ch_row_callback on_row, void* user, char** out) {
  return guarded(ctx, [&] {
    AverageSpec spec;
    spec.f = poly_of(f);
    spec.place = parse_place(text(place, "place"));
    spec.mode = parse_mode(text(mode, "mode"));
    if (alpha) {
      spec.target = Target::Preimage;
      spec.alpha = parse_point(alpha);
    }
    AverageEngine engine(map_of(map), ctx->opt);
    emit(out, series_json(ctx, average_series(engine, spec, kmin, kmax, ctx->tol, forward(ctx, on_row, user))));
  });
}

ch_status ch_lyapunov(ch_context* ctx, const ch_map* map, unsigned long kmin, unsigned long kmax, const char* mode,
                      ch_row_callback on_row, void* user, char** out) {
  return guarded(ctx, [&] {
    const Mode m = parse_mode(text(mode, "mode"));
    AverageEngine engine(map_of(map), ctx->opt);
    emit(out, series_json(ctx, lyapunov(engine, kmin, kmax, ctx->tol, m, forward(ctx, on_row, user))));
  });
}

ch_status ch_global_identity(ch_context* ctx, const ch_map* map, const ch_poly* f, unsigned long k, char** out) {
  return guarded(ctx, [&] {
    const GlobalIdentity g = global_periodic_identity(map_of(map), poly_of(f), k, ctx->opt);
    Json places = Json::object();
    for (const auto& [v, a] : g.per_place) places[v.label()] = real(ctx, a.value);
    Json j;
    j["k"] = g.k;
    j["per_place"] = places;
    j["total"] = real(ctx, g.total);
    j["target"] = real(ctx, g.target);
    j["difference"] = real(ctx, g.total - g.target);
    j["h_beta"] = real(ctx, g.h_beta);
    j["h_infinity"] = real(ctx, g.h_infinity);
    j["resultant"] = rat_to_json(g.resultant);
    j["product_formula_holds"] = g.product_formula_holds;
    emit(out, j);
  });
}

ch_status ch_classify(ch_context* ctx, const ch_map* map, const char* point, unsigned long bound, char** out) {
  return guarded(ctx, [&] {
    const ProjPoint x = parse_point(text(point, "point"));
    const OrbitClass c = classify_point(map_of(map), x, bound);
    Json j;
    j["point"] = to_string(x);
    j["kind"] = c.kind == OrbitKind::Periodic ? "periodic" : c.kind == OrbitKind::Preperiodic ? "preperiodic" : "wandering";
    j["tail"] = c.tail;
    j["period"] = c.period;
    j["bound"] = c.bound;
    j["exceptional"] = c.exceptional;
    emit(out, j);
  });
}

ch_status ch_counterexample(ch_context* ctx, unsigned nmax, ch_row_callback on_row, void* user, char** out) {
  return guarded(ctx, [&] {
    if (nmax < 1) fail(ErrorKind::Input, "nmax must be at least 1");
    Json rows = Json::array();
    for (unsigned n = 1; n <= nmax; ++n) {
      const DivergentAverage a = divergent_average(n, ctx->opt.height.bits);
      Json r;
      r["n"] = n;
      r["ell_n_log2"] = a.ell.to_string();
      r["value"] = real(ctx, a.value);
      r["paper_bound"] = real(ctx, a.bound);
      if (on_row) on_row(r.dump().c_str(), user);
      rows.push_back(std::move(r));
    }
    emit(out, {{"rows", rows}});
  });
}

}  // extern "C"
