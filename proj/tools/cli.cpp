#include <CLI11.hpp>
#include <canheight/canheight.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>

namespace {

using Json = nlohmann::ordered_json;

enum class Output { Json, Csv };

struct Flags {
  std::string map_path;
  std::string poly;
  std::string point;
  std::string alpha;
  std::string place = "inf";
  std::optional<unsigned long> k;
  unsigned long kmin = 1;
  unsigned long kmax = 20;
  std::string mode = "auto";
  unsigned long precision = 256;
  double tol = 1e-9;
  unsigned long degree_cap = 4096;
  std::string norm = "max";
  std::string output = "json";
  unsigned nmax = 3;
  unsigned long bound = 64;
};

struct Failure {
  int code;
  std::string message;
};

using Context = std::unique_ptr<ch_context, decltype(&ch_context_free)>;
using Map = std::unique_ptr<ch_map, decltype(&ch_map_free)>;
using Poly = std::unique_ptr<ch_poly, decltype(&ch_poly_free)>;

void check(ch_context* ctx, ch_status s) {
  if (s == CH_OK) return;
  std::string msg = ch_context_last_error(ctx);
  if (msg.empty()) msg = ch_status_name(s);
  throw Failure{ch_status_is_input_error(s) ? 2 : 1, msg};
}

void require(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty()) throw Failure{2, std::string(flag) + " is required for " + command};
}

std::string resolve_map(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (path.find('/') != std::string::npos) return path;
  // Bare names resolve against the bundled maps, with or without ".json".
  for (const fs::path candidate : {fs::path(CANHEIGHT_MAP_DIR) / path, fs::path(CANHEIGHT_MAP_DIR) / (path + ".json")})
    if (fs::exists(candidate)) return candidate.string();
  return path;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Header row on first call, then one line per row object.
struct CsvRows {
  bool header_done = false;

  void write(const Json& row) {
    if (!header_done) {
      std::string line;
      for (auto it = row.begin(); it != row.end(); ++it) line += (line.empty() ? "" : ",") + it.key();
      std::cout << line << "\n";
      header_done = true;
    }
    std::string line;
    bool first = true;
    for (const auto& v : row) {
      line += (first ? "" : ",") + csv_cell(v);
      first = false;
    }
    std::cout << line << std::endl;
  }
};

void on_csv_row(const char* row, void* user) { static_cast<CsvRows*>(user)->write(Json::parse(row)); }

void print_record(const std::string& text, Output out) {
  const Json j = Json::parse(text);
  if (out == Output::Json) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  CsvRows csv;
  if (j.contains("per_place")) {
    for (auto it = j.at("per_place").begin(); it != j.at("per_place").end(); ++it)
      csv.write(Json{{"place", it.key()}, {"value", it.value()}});
    csv.write(Json{{"place", "total"}, {"value", j.contains("total") ? j.at("total") : j.at("value")}});
    return;
  }
  Json flat = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!it.value().is_structured()) flat[it.key()] = it.value();
  csv.write(flat);
}

class Runner {
 public:
  Runner(const Flags& f, Output out) : f_(f), out_(out), ctx_(ch_context_new(), ch_context_free) {
    if (!ctx_) throw Failure{1, "out of memory"};
    check(ctx_.get(), ch_context_set_precision(ctx_.get(), f.precision));
    check(ctx_.get(), ch_context_set_tolerance(ctx_.get(), f.tol));
    check(ctx_.get(), ch_context_set_degree_cap(ctx_.get(), f.degree_cap));
    check(ctx_.get(), ch_context_set_norm(ctx_.get(), f.norm.c_str()));
  }

  void run(const std::string& cmd) {
    char* result = nullptr;
    ch_context* c = ctx_.get();
    bool streamed = false;
    if (cmd == "counterexample") {
      streamed = series([&](ch_row_callback cb, void* user) { return ch_counterexample(c, f_.nmax, cb, user, &result); });
    } else {
      require(f_.map_path, "--map", cmd);
      Map map(load_map(), ch_map_free);
      const ch_map* m = map.get();
      if (cmd == "height") {
        if (!f_.poly.empty()) {
          Poly p = poly(cmd);
          check(c, ch_height_algebraic(c, m, p.get(), &result));
        } else {
          require(f_.point, "--point", cmd);
          check(c, ch_height(c, m, f_.point.c_str(), &result));
        }
      } else if (cmd == "local-height") {
        require(f_.point, "--point", cmd);
        check(c, ch_local_height(c, m, f_.point.c_str(), f_.place.c_str(), &result));
      } else if (cmd == "mahler") {
        Poly p = poly(cmd);
        check(c, ch_mahler(c, m, p.get(), f_.place.c_str(), &result));
      } else if (cmd == "periodic-avg" || cmd == "preimage-avg") {
        Poly p = poly(cmd);
        const char* alpha = nullptr;
        if (cmd == "preimage-avg") {
          require(f_.alpha, "--alpha", cmd);
          alpha = f_.alpha.c_str();
        }
        if (f_.k) {
          check(c, alpha ? ch_preimage_average(c, m, p.get(), alpha, f_.place.c_str(), *f_.k, f_.mode.c_str(), &result)
                         : ch_periodic_average(c, m, p.get(), f_.place.c_str(), *f_.k, f_.mode.c_str(), &result));
        } else {
          streamed = series([&](ch_row_callback cb, void* user) {
            return ch_average_series(c, m, p.get(), f_.place.c_str(), alpha, f_.kmin, f_.kmax, f_.mode.c_str(), cb,
                                     user, &result);
          });
        }
      } else if (cmd == "global-identity") {
        Poly p = poly(cmd);
        if (!f_.k) throw Failure{2, "--k is required for global-identity"};
        check(c, ch_global_identity(c, m, p.get(), *f_.k, &result));
      } else if (cmd == "lyapunov") {
        const unsigned long kmin = f_.k ? *f_.k : f_.kmin, kmax = f_.k ? *f_.k : f_.kmax;
        streamed = series([&](ch_row_callback cb, void* user) {
          return ch_lyapunov(c, m, kmin, kmax, f_.mode.c_str(), cb, user, &result);
        });
      } else if (cmd == "classify") {
        require(f_.point, "--point", cmd);
        check(c, ch_classify(c, m, f_.point.c_str(), f_.bound, &result));
      }
    }
    std::unique_ptr<char, decltype(&ch_string_free)> owned(result, ch_string_free);
    if (!streamed && result) print_record(result, out_);
  }

 private:
  ch_map* load_map() {
    ch_map* m = nullptr;
    check(ctx_.get(), ch_map_from_file(ctx_.get(), resolve_map(f_.map_path).c_str(), &m));
    return m;
  }

  Poly poly(const std::string& cmd) {
    require(f_.poly, "--poly", cmd);
    ch_poly* p = nullptr;
    check(ctx_.get(), ch_poly_parse(ctx_.get(), f_.poly.c_str(), &p));
    return Poly(p, ch_poly_free);
  }

  // CSV streams rows through the callback; JSON prints the whole record.
  template <class Call>
  bool series(Call call) {
    if (out_ == Output::Csv) {
      CsvRows rows;
      check(ctx_.get(), call(on_csv_row, &rows));
      return true;
    }
    check(ctx_.get(), call(nullptr, nullptr));
    return false;
  }

  const Flags& f_;
  Output out_;
  Context ctx_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical heights, local heights and equidistribution averages for rational maps over Q"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  Flags f;
  app.add_option("--map", f.map_path, "Map JSON file");
  app.add_option("--poly", f.poly, "Polynomial F, comma-separated rationals in ascending degree");
  app.add_option("--point", f.point, "Point a/b or inf");
  app.add_option("--alpha", f.alpha, "Target point for preimage averages");
  app.add_option("--place", f.place, "inf or a prime")->capture_default_str();
  app.add_option("--k", f.k, "Single iterate index");
  app.add_option("--kmin", f.kmin, "First row of a convergence table")->capture_default_str();
  app.add_option("--kmax", f.kmax, "Last row of a convergence table")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--mode", f.mode, "exact, numeric or auto")->capture_default_str();
  app.add_option("--precision", f.precision, "Working precision in bits")->capture_default_str()->check(CLI::Range(64ul, 1ul << 24));
  app.add_option("--tol", f.tol, "Convergence tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--degree-cap", f.degree_cap, "Largest d^k built exactly")->capture_default_str();
  app.add_option("--norm", f.norm, "max or fubini-study")->capture_default_str();
  app.add_option("--output", f.output, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--nmax", f.nmax, "Largest n for the counterexample table")->capture_default_str();
  app.add_option("--bound", f.bound, "Orbit length searched by classify")->capture_default_str();

  const char* commands[][2] = {
      {"height", "Canonical height of a point (--point) or of a root of F (--poly)"},
      {"local-height", "Local canonical height at a place"},
      {"mahler", "Dynamical Mahler measure of F at a place"},
      {"periodic-avg", "Averages of log|F| over k-periodic points"},
      {"preimage-avg", "Averages of log|F| over k-th preimages of alpha"},
      {"global-identity", "Sum over places of periodic averages against the height identity"},
      {"lyapunov", "Periodic-point averages of log|phi'|"},
      {"classify", "Periodic, preperiodic or wandering orbit"},
      {"counterexample", "Root-of-unity averages at a transcendental point"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    Runner(f, f.output == "csv" ? Output::Csv : Output::Json).run(cmd);
  } catch (const Failure& e) {
    std::cout.flush();
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return 0;
}
