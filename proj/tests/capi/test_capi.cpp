#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <canheight/canheight.h>
#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

using Json = nlohmann::ordered_json;

namespace {

const char* kSquaring = R"({"d": 2, "P": ["1", "0", "0"], "Q": ["0", "0", "1"]})";

struct Fixture {
  ch_context* ctx = ch_context_new();
  ch_map* map = nullptr;
  Fixture() { REQUIRE(ch_map_from_json(ctx, kSquaring, &map) == CH_OK); }
  ~Fixture() {
    ch_map_free(map);
    ch_context_free(ctx);
  }

  Json take(ch_status s, char*& out) {
    REQUIRE_MESSAGE(s == CH_OK, ch_context_last_error(ctx));
    Json j = Json::parse(out);
    ch_string_free(out);
    return j;
  }
};

double num(const Json& j) { return std::stod(j.get<std::string>()); }

void collect(const char* row, void* user) { static_cast<std::vector<Json>*>(user)->push_back(Json::parse(row)); }

}  // namespace

TEST_CASE_FIXTURE(Fixture, "heights through the C interface") {
  char* out = nullptr;
  Json h = take(ch_height(ctx, map, "2/3", &out), out);
  CHECK(num(h["value"]) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(h["per_place"].begin().key() == "inf");

  Json l = take(ch_local_height(ctx, map, "2", "inf", &(out = nullptr)), out);
  CHECK(num(l["value"]) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("null handles are input errors") {
  ch_context* ctx = ch_context_new();
  char* out = nullptr;
  CHECK(ch_mahler(ctx, nullptr, nullptr, "inf", &out) == CH_INVALID_INPUT);
  CHECK(std::string(ch_context_last_error(ctx)).find("is missing") != std::string::npos);
  CHECK(ch_status_is_input_error(CH_INVALID_INPUT));
  CHECK(ch_status_is_input_error(CH_DEGENERATE_MAP));
  CHECK_FALSE(ch_status_is_input_error(CH_EXCEPTIONAL_TARGET));
  CHECK_FALSE(ch_status_is_input_error(CH_BUDGET_EXCEEDED));
  CHECK(ch_height(nullptr, nullptr, "1", &out) == CH_INVALID_INPUT);
  ch_context_free(ctx);
}

TEST_CASE("status codes") {
  ch_context* ctx = ch_context_new();
  ch_map* m = nullptr;
  CHECK(ch_map_from_json(ctx, R"({"d": 2, "P": ["1", "-1", "0"], "Q": ["1", "-1", "0"]})", &m) == CH_DEGENERATE_MAP);
  CHECK(std::string(ch_context_last_error(ctx)) == "degenerate map");
  CHECK(ch_map_from_json(ctx, "{", &m) == CH_INVALID_INPUT);
  CHECK(ch_map_from_json(ctx, R"({"d": 1, "P": ["1", "0"], "Q": ["0", "1"]})", &m) == CH_INVALID_INPUT);
  CHECK(ch_map_from_file(ctx, "/nonexistent/map.json", &m) == CH_INVALID_INPUT);
  ch_poly* p = nullptr;
  CHECK(ch_poly_parse(ctx, "0,0", &p) == CH_INVALID_INPUT);
  CHECK(ch_poly_parse(ctx, "1,x", &p) == CH_INVALID_INPUT);
  CHECK(ch_poly_parse(ctx, "1/0,1", &p) == CH_INVALID_INPUT);
  CHECK(ch_context_set_precision(ctx, 32) == CH_INVALID_INPUT);
  CHECK(ch_context_set_tolerance(ctx, -1) == CH_INVALID_INPUT);
  CHECK(ch_context_set_norm(ctx, "l2") == CH_INVALID_INPUT);
  CHECK(ch_context_set_norm(ctx, "fubini-study") == CH_OK);
  ch_context_free(ctx);
}

TEST_CASE_FIXTURE(Fixture, "averages and series") {
  ch_poly* f = nullptr;
  REQUIRE(ch_poly_parse(ctx, "-2,1", &f) == CH_OK);
  char* out = nullptr;
  Json a = take(ch_periodic_average(ctx, map, f, "inf", 2, "exact", &out), out);
  CHECK(num(a["value"]) == doctest::Approx((std::log(2.0) + std::log(7.0)) / 4).epsilon(1e-14));
  CHECK(a["mode"] == "exact");

  CHECK(ch_preimage_average(ctx, map, f, "0", "inf", 3, "exact", &(out = nullptr)) == CH_EXCEPTIONAL_TARGET);
  CHECK(std::string(ch_context_last_error(ctx)) == "exceptional target");
  CHECK(ch_periodic_average(ctx, map, f, "2", 3, "numeric", &out) == CH_INVALID_INPUT);
  CHECK(ch_periodic_average(ctx, map, f, "4", 3, "exact", &out) == CH_INVALID_INPUT);
  CHECK(ch_periodic_average(ctx, map, f, "inf", 3, "fast", &out) == CH_INVALID_INPUT);
  REQUIRE(ch_context_set_degree_cap(ctx, 64) == CH_OK);
  CHECK(ch_periodic_average(ctx, map, f, "inf", 8, "exact", &out) == CH_BUDGET_EXCEEDED);

  std::vector<Json> rows;
  Json s = take(ch_average_series(ctx, map, f, "inf", "1", 1, 4, "auto", collect, &rows, &(out = nullptr)), out);
  REQUIRE(rows.size() == 4);
  CHECK(s["rows"].size() == 4);
  CHECK(rows[0]["delta"].is_null());
  CHECK(rows[2] == s["rows"][2]);
  CHECK(num(rows[0]["value"]) == doctest::Approx(std::log(3.0) / 2).epsilon(1e-14));

  rows.clear();
  Json ly = take(ch_lyapunov(ctx, map, 3, 5, "auto", collect, &rows, &(out = nullptr)), out);
  CHECK(rows.size() == 3);
  CHECK(num(ly["limit_estimate"]) == doctest::Approx(std::log(2.0) * (1 - 1.0 / 32)).epsilon(1e-12));

  Json g = take(ch_global_identity(ctx, map, f, 4, &(out = nullptr)), out);
  CHECK(g["product_formula_holds"] == true);
  ch_poly_free(f);
}

TEST_CASE_FIXTURE(Fixture, "classification, description and the counterexample table") {
  char* out = nullptr;
  Json c = take(ch_classify(ctx, map, "-1", 16, &out), out);
  CHECK(c["kind"] == "preperiodic");
  CHECK(c["tail"] == 1);
  CHECK(c["period"] == 1);

  Json d = take(ch_map_describe(ctx, map, &(out = nullptr)), out);
  CHECK(d["bad_primes"].empty());

  std::vector<Json> rows;
  Json t = take(ch_counterexample(ctx, 3, collect, &rows, &(out = nullptr)), out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2]["ell_n_log2"] == "48");
  CHECK(num(rows[1]["value"]) == doctest::Approx(-1.79128).epsilon(1e-5));
  CHECK(ch_counterexample(ctx, 9, nullptr, nullptr, &out) == CH_INVALID_INPUT);
}

TEST_CASE_FIXTURE(Fixture, "reals carry precision-derived digits") {
  char* out = nullptr;
  Json lo = take(ch_local_height(ctx, map, "3", "inf", &out), out);
  REQUIRE(ch_context_set_precision(ctx, 512) == CH_OK);
  Json hi = take(ch_local_height(ctx, map, "3", "inf", &(out = nullptr)), out);
  CHECK(hi["value"].get<std::string>().size() > lo["value"].get<std::string>().size());
  CHECK(hi["precision_bits"].get<long>() >= 512);
}
