#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "depthlab/config.hpp"
#include "depthlab/harness.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/rng.hpp"
#include "json.hpp"

using namespace depthlab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse_ok(const std::string& text) {
  const ConfigParseResult r = parse_config(text);
  for (const ConfigError& e : r.errors) MESSAGE(format_error(e));
  REQUIRE(r.ok());
  return *r.config;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("depthlab_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kSweep = R"(
[experiment]
type = threshold-sweep
measure = uniform-cube
dimensions = 8
seed = 42
counts = 9, 40, 200
[budget]
reps = 2
test_points = 100
kappa_samples = 50
)";

}  // namespace

TEST_SUITE("harness-cli") {
  TEST_CASE("minimal config gets documented defaults") {
    const ExperimentConfig c = parse_ok("[experiment]\ntype = expected-depth\nmeasure = gaussian-standard\nseed = 7\n");
    CHECK(c.experiment == ExperimentKind::kExpectedDepth);
    CHECK(c.seed == 7);
    CHECK(c.dimensions == std::vector<int>{2});
    CHECK(c.budgets.samples == 10000);
    CHECK(c.budgets.net_size == 64);
    CHECK(c.tolerances.sigmas == 3.0);
    CHECK(c.output_dir == "out/expected-depth");
    CHECK(c.formats == std::vector<std::string>{"csv", "json", "svg"});
    CHECK_FALSE(c.log_x);
    CHECK(parse_ok("[experiment]\ntype=threshold-sweep\nmeasure=uniform-cube\nseed=1\n").log_x);
  }

  TEST_CASE("comments, BOM and whitespace") {
    const ExperimentConfig c = parse_ok(
        "\xEF\xBB\xBF# leading comment\n[experiment]  \n  type = dilation   ; trailing\n"
        "measure=uniform-ball\r\nseed=3\ndimensions = 2, 3,4\n[output]\ndir = results/a#b\n");
    CHECK(c.dimensions == std::vector<int>{2, 3, 4});
    CHECK(c.output_dir == "results/a#b");
  }

  TEST_CASE("nonpositive budget names the key") {
    const ConfigParseResult r =
        parse_config("[experiment]\ntype = expected-depth\nmeasure = gaussian-standard\nseed = 1\n[budget]\nsamples = 0\n");
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].key == "budget.samples");
    CHECK(r.errors[0].line == 6);
    CHECK(format_error(r.errors[0]).find("budget.samples") != std::string::npos);
  }

  TEST_CASE("unknown key suggests the nearest valid key") {
    const ConfigParseResult r = parse_config("[experiment]\ntype = expected-depth\nmeasur = gaussian-standard\nseed = 1\n");
    CHECK_FALSE(r.ok());
    bool suggested = false;
    for (const ConfigError& e : r.errors) {
      if (e.message.find("unknown key 'measur'") != std::string::npos) {
        suggested = e.message.find("did you mean 'measure'") != std::string::npos;
        CHECK(e.line == 3);
      }
    }
    CHECK(suggested);
    const ConfigParseResult moved = parse_config(
        "[experiment]\ntype = expected-depth\nmeasure = gaussian-standard\nseed = 1\nsamples = 5\n");
    REQUIRE(moved.errors.size() == 1);
    CHECK(moved.errors[0].message.find("[budget]") != std::string::npos);
  }

  TEST_CASE("all errors are reported") {
    const ConfigParseResult r = parse_config(
        "[experiment]\ntype = expected-dept\nmeasure = gaussian\n[budgt]\nreps = 2\n[budget]\nreps = -1\nnet_size = x\n"
        "reps = 4\nnot a pair\n");
    CHECK_FALSE(r.ok());
    std::vector<std::string> text;
    for (const ConfigError& e : r.errors) text.push_back(format_error(e));
    const auto has = [&](const std::string& s) {
      return std::any_of(text.begin(), text.end(), [&](const std::string& t) { return t.find(s) != std::string::npos; });
    };
    CHECK(has("unknown experiment 'expected-dept'"));
    CHECK(has("unknown measure 'gaussian'"));
    CHECK(has("unknown section [budgt]; did you mean 'budget'?"));
    CHECK(has("budget.reps: must be positive"));
    CHECK(has("budget.net_size: expected a positive integer"));
    CHECK(has("budget.reps: duplicate key"));
    CHECK(has("line 10: expected 'key = value'"));
    CHECK(has("missing seed"));
    CHECK(r.errors.size() == 8);
  }

  TEST_CASE("semantic checks") {
    CHECK_FALSE(parse_config("[experiment]\ntype=dilation\nmeasure=gaussian-standard\nseed=1\ndimensions=5\ncounts=4\n").ok());
    CHECK_FALSE(
        parse_config("[experiment]\ntype=threshold-sweep\nmeasure=uniform-cube\nseed=1\ncounts=40,20\n").ok());
    CHECK_FALSE(parse_config("[experiment]\ntype=dilation\nmeasure=custom-density\nseed=1\n").ok());
    CHECK_FALSE(parse_config("type=dilation\n").ok());
    CHECK_FALSE(parse_config("[output]\nformats = csv, pdf\n").ok());
    const ConfigParseResult few = parse_config(
        "[experiment]\ntype=threshold-sweep\nmeasure=uniform-cube\nseed=1\n[budget]\ntest_points=50\n");
    REQUIRE(few.errors.size() == 1);
    CHECK(few.errors[0].key == "budget.test_points");
  }

  TEST_CASE("FNV-1a test vectors and hash stability") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    const ExperimentConfig a = parse_ok(kSweep);
    ExperimentConfig b = parse_ok(std::string(kSweep) + "[output]\ndir = elsewhere\n[tolerance]\nsigmas = 3\n");
    CHECK(config_hash(a) == config_hash(b));  // output location and explicit defaults do not matter
    CHECK(config_hash(a).size() == 16);
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(canonical_text(a).find("budget.reps=2\n") != std::string::npos);
  }

  TEST_CASE("shortest round-trip numbers") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(100.0) == "100");
    CHECK(format_double(kInf) == "inf");
    CHECK(format_double(kNaN) == "nan");
    Rng rng(RngStream{9, 0});
    for (int i = 0; i < 1000; ++i) {
      const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
      const std::string s = format_double(x);
      double back = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == x);
    }
  }

  TEST_CASE("edit distance") {
    CHECK(edit_distance("measur", "measure") == 1);
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("", "abc") == 3);
  }

  TEST_CASE("CSV quoting") {
    MetricTable t{"t", {"name", "value", "flag", "count", "missing"}, {}};
    t.add_row({std::string("a,b"), 0.5, true, std::int64_t{3}, std::monostate{}});
    t.add_row({std::string("say \"hi\"\nthere"), 1e-300, false, std::int64_t{-1}, std::monostate{}});
    CHECK(to_csv(t) ==
          "name,value,flag,count,missing\r\n\"a,b\",0.5,true,3,\r\n\"say \"\"hi\"\"\nthere\",1e-300,false,-1,\r\n");
    CHECK_THROWS_AS(t.add_row({0.1}), Error);
  }

  TEST_CASE("JSON round trip is lossless") {
    RunRecord r;
    r.experiment = "dilation";
    r.config_hash = "0123456789abcdef";
    r.version = artifact_version();
    r.seed = 18446744073709551615ULL;
    r.started = "2026-01-01T00:00:00Z";
    r.finished = "2026-01-01T00:00:01Z";
    MetricTable& t = r.table("m", {"a", "b", "c", "d", "e", "f"});
    t.add_row({0.1, kNaN, kInf, std::int64_t{-7}, std::string("x"), true});
    t.add_row({-kInf, 2.0, 1e-320, std::int64_t{0}, std::monostate{}, false});
    r.assertions.push_back(check_bound("le", 0.3, 0.5));
    r.assertions.push_back(check_bound("ge", kNaN, 0.5, true));
    r.assertions.push_back(skipped("skip", "reason \"quoted\""));
    r.plots.push_back(PlotSpec{"p", "m", "a", "b", "", "", "", "x", "y", true});
    r.partial = true;
    r.error = "boom";
    const std::string text = to_json(r);
    const RunRecord back = record_from_json(text);
    CHECK(back == r);
    CHECK(to_json(back) == text);
    CHECK(std::get<double>(back.metrics[0].rows[1][2]) == 1e-320);
    CHECK(back.assertions[1].status == AssertionStatus::kFail);
    CHECK_THROWS_AS((void)record_from_json("{}"), Error);
    CHECK_THROWS_AS((void)record_from_json("not json"), Error);
  }

  TEST_CASE("empty record emits only a valid summary") {
    const fs::path dir = scratch("empty");
    RunRecord r;
    r.experiment = "expected-depth";
    const std::vector<std::string> files = emit(r, dir.string());
    REQUIRE(files.size() == 1);
    CHECK(fs::path(files[0]).filename() == "summary.json");
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
    const auto j = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(j.at("metrics").is_array());
    CHECK(j.at("metrics").empty());
    CHECK(j.at("schema_version") == kRecordSchemaVersion);
    fs::remove_all(dir);
  }

  TEST_CASE("write failure flushes a partial summary") {
    const fs::path dir = scratch("partial");
    fs::create_directories(dir / "m.csv");  // a directory where the CSV should go
    RunRecord r;
    r.experiment = "dilation";
    r.table("m", {"x"}).add_row({1.0});
    CHECK_THROWS_AS(emit(r, dir.string()), Error);
    const RunRecord back = record_from_json(read_file(dir / "summary.json"));
    CHECK(back.partial);
    CHECK_FALSE(back.error.empty());
    fs::remove_all(dir);
  }

  TEST_CASE("SVG plot") {
    RunRecord r;
    r.experiment = "threshold-sweep";
    MetricTable& t = r.table("c", {"n", "N", "v", "lo", "hi"});
    for (int n : {2, 3}) {
      for (int k = 1; k <= 4; ++k) t.add_row({std::int64_t{n}, std::int64_t{1 << (3 * k)}, 0.2 * k, 0.2 * k - 0.05, 0.2 * k + 0.05});
    }
    const std::string svg = render_svg(r, PlotSpec{"c", "c", "N", "v", "lo", "hi", "n", "N", "value", true});
    CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
    CHECK(svg.find("(log scale)") != std::string::npos);
    CHECK(svg.find("n=3") != std::string::npos);
    CHECK(render_svg(r, PlotSpec{"c", "c", "N", "v", "lo", "hi", "n", "N", "value", true}) == svg);
    CHECK_THROWS_AS((void)render_svg(r, PlotSpec{"c", "c", "nope", "v"}), Error);
  }

  TEST_CASE("expected-depth gaussian n=1 row") {
    ExperimentConfig c = parse_ok(
        "[experiment]\ntype = expected-depth\nmeasure = gaussian-standard\ndimensions = 1\nseed = 5\n"
        "[budget]\nsamples = 40000\n");
    const RunRecord r = run(c);
    CHECK_FALSE(r.partial);
    const MetricTable* t = r.find_table("expected_depth");
    REQUIRE(t != nullptr);
    REQUIRE(t->rows.size() == 1);
    CHECK(cell_number(t->rows[0][t->column("value")]) == doctest::Approx(0.25).epsilon(0.02));
    CHECK(r.all_passed());
    CHECK(r.count(AssertionStatus::kPass) == 2);
  }

  TEST_CASE("threshold sweep CSV is byte-identical across runs and thread counts") {
    const ExperimentConfig c = parse_ok(kSweep);
    const int saved = default_threads();
    set_default_threads(1);
    const RunRecord a = run(c);
    set_default_threads(3);
    const RunRecord b = run(c);
    set_default_threads(saved);
    REQUIRE_FALSE(a.partial);
    REQUIRE(a.find_table("threshold") != nullptr);
    CHECK(a.find_table("threshold")->rows.size() == 3);
    for (const char* name : {"threshold", "threshold_summary"}) {
      CHECK(to_csv(*a.find_table(name)) == to_csv(*b.find_table(name)));
    }
    const fs::path d1 = scratch("sweep1"), d2 = scratch("sweep2");
    emit(a, d1.string());
    emit(b, d2.string());
    CHECK(read_file(d1 / "threshold.csv") == read_file(d2 / "threshold.csv"));
    CHECK(read_file(d1 / "threshold.svg") == read_file(d2 / "threshold.svg"));
    CHECK(fs::exists(d1 / "summary.json"));
    fs::remove_all(d1);
    fs::remove_all(d2);
  }

  TEST_CASE("a failure part-way keeps earlier results") {
    const ExperimentConfig c = parse_ok(
        "[experiment]\ntype = dilation\nmeasure = gaussian-standard\ndimensions = 2, 40\nseed = 1\ndeltas = 0.1\n"
        "[budget]\npolytopes = 2\nsamples = 500\n");
    const RunRecord r = run(c);
    CHECK(r.partial);
    CHECK_FALSE(r.error.empty());
    CHECK_FALSE(r.all_passed());
    REQUIRE(r.find_table("dilation") != nullptr);
    CHECK(r.find_table("dilation")->rows.size() == 2);
  }

  TEST_CASE("each experiment runs at small scale") {
    const char* configs[] = {
        "[experiment]\ntype=cramer-surface\nmeasure=gaussian-standard\ndimensions=1,2\nseed=1\nradii=0,1,2\n"
        "[budget]\nnet_size=8\n",
        "[experiment]\ntype=cramer-surface\nmeasure=discrete-cube\ndimensions=2\nseed=1\n",
        "[experiment]\ntype=inclusion-suite\nmeasure=gaussian-standard\ndimensions=2\nseed=1\n"
        "[budget]\ndirections=20\n",
        "[experiment]\ntype=bound-sandwich\nmeasure=gaussian-standard\ndimensions=2\nseed=1\ncounts=25,100\n"
        "[budget]\nsamples=500\nreps=2\ntest_points=100\ndirections=100\n",
        "[experiment]\ntype=dilation\nmeasure=uniform-cube\ndimensions=2\nseed=1\n[budget]\npolytopes=2\nsamples=1000\n",
    };
    for (const char* text : configs) {
      const RunRecord r = run(parse_ok(text));
      INFO(r.experiment << " " << r.error);
      CHECK_FALSE(r.partial);
      CHECK_FALSE(r.assertions.empty());
      for (const Assertion& a : r.assertions) {
        INFO(a.name << " " << a.measured << " " << a.relation << " " << a.bound << " " << a.detail);
        CHECK(a.status != AssertionStatus::kFail);
      }
    }
  }
}
