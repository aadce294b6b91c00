#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "depthlab/harness.hpp"
#include "json.hpp"

namespace depthlab {

namespace {

using json = nlohmann::json;

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_cell(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const double* x = std::get_if<double>(&a)) return same_double(*x, std::get<double>(b));
  return a == b;
}

// Doubles that JSON cannot hold are tagged so they survive a reload.
json double_to_json(double x) {
  if (std::isfinite(x)) return x;
  return json{{"float", format_double(x)}};
}

double double_from_json(const json& j) {
  if (j.is_null()) return kNaN;
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("float")) {
    const std::string s = j.at("float").get<std::string>();
    if (s == "nan") return kNaN;
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw Error(Errc::kConfig, "record: malformed number " + j.dump());
}

json cell_to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return double_to_json(v);
        } else {
          return v;
        }
      },
      c);
}

Cell cell_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  return double_from_json(j);
}

std::string csv_field(const Cell& c) {
  std::string text = std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return v;
        }
      },
      c);
  return text;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(Errc::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace

void MetricTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(Errc::kInvalidArgument, "table " + name + ": row has " + std::to_string(row.size()) +
                                            " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

int MetricTable::column(const std::string& col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

bool operator==(const MetricTable& a, const MetricTable& b) {
  if (a.name != b.name || a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) return false;
    for (std::size_t j = 0; j < a.rows[i].size(); ++j) {
      if (!same_cell(a.rows[i][j], b.rows[i][j])) return false;
    }
  }
  return true;
}

bool operator==(const Assertion& a, const Assertion& b) {
  return a.name == b.name && a.status == b.status && same_double(a.measured, b.measured) &&
         same_double(a.bound, b.bound) && a.relation == b.relation && a.detail == b.detail;
}

double cell_number(const Cell& cell) {
  if (const double* x = std::get_if<double>(&cell)) return *x;
  if (const std::int64_t* k = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*k);
  if (const bool* b = std::get_if<bool>(&cell)) return *b ? 1.0 : 0.0;
  return kNaN;
}

const char* to_string(AssertionStatus status) {
  switch (status) {
    case AssertionStatus::kPass: return "pass";
    case AssertionStatus::kFail: return "fail";
    case AssertionStatus::kSkipped: return "skipped";
  }
  return "unknown";
}

Assertion check_bound(std::string name, double measured, double bound, bool at_least, std::string detail) {
  Assertion a;
  a.name = std::move(name);
  a.measured = measured;
  a.bound = bound;
  a.relation = at_least ? ">=" : "<=";
  a.detail = std::move(detail);
  const bool ok = at_least ? measured >= bound : measured <= bound;
  a.status = ok ? AssertionStatus::kPass : AssertionStatus::kFail;  // NaN compares false
  return a;
}

Assertion skipped(std::string name, std::string reason) {
  Assertion a;
  a.name = std::move(name);
  a.status = AssertionStatus::kSkipped;
  a.detail = std::move(reason);
  return a;
}

MetricTable& RunRecord::table(const std::string& name, std::vector<std::string> columns) {
  for (MetricTable& t : metrics) {
    if (t.name == name) return t;
  }
  metrics.push_back(MetricTable{name, std::move(columns), {}});
  return metrics.back();
}

const MetricTable* RunRecord::find_table(const std::string& name) const {
  for (const MetricTable& t : metrics) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

bool RunRecord::all_passed() const { return !partial && count(AssertionStatus::kFail) == 0; }

std::size_t RunRecord::count(AssertionStatus status) const {
  return static_cast<std::size_t>(
      std::count_if(assertions.begin(), assertions.end(), [&](const Assertion& a) { return a.status == status; }));
}

std::string artifact_version() { return DEPTHLAB_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_csv(const MetricTable& table, std::ostream& out) {
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j > 0) out << ',';
    out << csv_quote(table.columns[j]);
  }
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      out << csv_quote(csv_field(row[j]));
    }
    out << "\r\n";
  }
}

std::string to_csv(const MetricTable& table) {
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

std::string to_json(const RunRecord& r) {
  json metrics = json::array();
  for (const MetricTable& t : r.metrics) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json cells = json::array();
      for (const Cell& c : row) cells.push_back(cell_to_json(c));
      rows.push_back(std::move(cells));
    }
    metrics.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  json assertions = json::array();
  for (const Assertion& a : r.assertions) {
    assertions.push_back({{"name", a.name},
                          {"status", to_string(a.status)},
                          {"measured", double_to_json(a.measured)},
                          {"bound", double_to_json(a.bound)},
                          {"relation", a.relation},
                          {"detail", a.detail}});
  }
  json plots = json::array();
  for (const PlotSpec& p : r.plots) {
    plots.push_back({{"name", p.name}, {"table", p.table}, {"x", p.x}, {"y", p.y}, {"lo", p.lo}, {"hi", p.hi},
                     {"group", p.group}, {"x_label", p.x_label}, {"y_label", p.y_label}, {"log_x", p.log_x}});
  }
  json j = {
      {"schema", "depthlab.run"},
      {"schema_version", kRecordSchemaVersion},
      {"experiment", r.experiment},
      {"config_hash", r.config_hash},
      {"version", r.version},
      {"seed", r.seed},
      {"started", r.started},
      {"finished", r.finished},
      {"partial", r.partial},
      {"error", r.error},
      {"counts",
       {{"pass", r.count(AssertionStatus::kPass)},
        {"fail", r.count(AssertionStatus::kFail)},
        {"skipped", r.count(AssertionStatus::kSkipped)}}},
      {"metrics", std::move(metrics)},
      {"assertions", std::move(assertions)},
      {"plots", std::move(plots)},
  };
  return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
  RunRecord r;
  try {
    const json j = json::parse(text);
    if (j.at("schema") != "depthlab.run") throw Error(Errc::kConfig, "record: not a depthlab run record");
    const int version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion) {
      throw Error(Errc::kConfig, "record: unsupported schema version " + std::to_string(version));
    }
    r.experiment = j.at("experiment").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.started = j.at("started").get<std::string>();
    r.finished = j.at("finished").get<std::string>();
    r.partial = j.at("partial").get<bool>();
    r.error = j.at("error").get<std::string>();
    for (const json& t : j.at("metrics")) {
      MetricTable table{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
      for (const json& row : t.at("rows")) {
        std::vector<Cell> cells;
        for (const json& c : row) cells.push_back(cell_from_json(c));
        table.add_row(std::move(cells));
      }
      r.metrics.push_back(std::move(table));
    }
    for (const json& a : j.at("assertions")) {
      Assertion x;
      x.name = a.at("name").get<std::string>();
      const std::string status = a.at("status").get<std::string>();
      if (status == "pass") {
        x.status = AssertionStatus::kPass;
      } else if (status == "fail") {
        x.status = AssertionStatus::kFail;
      } else if (status == "skipped") {
        x.status = AssertionStatus::kSkipped;
      } else {
        throw Error(Errc::kConfig, "record: unknown assertion status '" + status + "'");
      }
      x.measured = double_from_json(a.at("measured"));
      x.bound = double_from_json(a.at("bound"));
      x.relation = a.at("relation").get<std::string>();
      x.detail = a.at("detail").get<std::string>();
      r.assertions.push_back(std::move(x));
    }
    for (const json& p : j.at("plots")) {
      r.plots.push_back(PlotSpec{p.at("name"), p.at("table"), p.at("x"), p.at("y"), p.at("lo"), p.at("hi"),
                                 p.at("group"), p.at("x_label"), p.at("y_label"), p.at("log_x")});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kConfig, std::string("record: ") + e.what());
  }
  return r;
}

std::string render_svg(const RunRecord& record, const PlotSpec& plot) {
  constexpr double kWidth = 800.0, kHeight = 600.0;
  constexpr double kLeft = 80.0, kRight = 160.0, kTop = 40.0, kBottom = 70.0;
  const MetricTable* table = record.find_table(plot.table);
  if (table == nullptr) throw Error(Errc::kInvalidArgument, "plot " + plot.name + ": no table " + plot.table);
  const int xc = table->column(plot.x), yc = table->column(plot.y);
  const int lc = plot.lo.empty() ? -1 : table->column(plot.lo);
  const int hc = plot.hi.empty() ? -1 : table->column(plot.hi);
  const int gc = plot.group.empty() ? -1 : table->column(plot.group);
  if (xc < 0 || yc < 0) throw Error(Errc::kInvalidArgument, "plot " + plot.name + ": unknown column");

  struct Point { double x, y, lo, hi; };
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<Point>> groups;
  for (const auto& row : table->rows) {
    double x = cell_number(row[xc]);
    const double y = cell_number(row[yc]);
    if (plot.log_x) x = x > 0.0 ? std::log(x) : kNaN;
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    const double lo = lc >= 0 ? cell_number(row[lc]) : y;
    const double hi = hc >= 0 ? cell_number(row[hc]) : y;
    const std::string key = gc >= 0 ? csv_field(row[gc]) : std::string();
    if (!groups.count(key)) group_order.push_back(key);
    groups[key].push_back({x, y, std::isfinite(lo) ? lo : y, std::isfinite(hi) ? hi : y});
  }

  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (auto& [key, pts] : groups) {
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    for (const Point& p : pts) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min({y0, p.y, p.lo}), y1 = std::max({y1, p.y, p.hi});
    }
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
    << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
    << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"16\">" << xml_escape(record.experiment + ": " + plot.name) << "</text>\n"
    << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
    << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
    const std::string xl = plot.log_x ? tick_label(std::exp(xv)) : tick_label(xv);
    s << "<line x1=\"" << fixed(sx(xv)) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(sx(xv))
      << "\" y2=\"" << fixed(kTop + ph + 5) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(kTop + ph + 20)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xl << "</text>\n"
      << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(sy(yv)) << "\" x2=\"" << fixed(kLeft)
      << "\" y2=\"" << fixed(sy(yv)) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(sy(yv) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(yv) << "</text>\n";
  }
  s << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 20)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(plot.x_label.empty() ? plot.x : plot.x_label) << (plot.log_x ? " (log scale)" : "") << "</text>\n"
    << "<text transform=\"translate(20," << fixed(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(plot.y_label.empty() ? plot.y : plot.y_label) << "</text>\n";

  for (std::size_t g = 0; g < group_order.size(); ++g) {
    const auto& pts = groups[group_order[g]];
    const char* color = kColors[g % 10];
    if (lc >= 0 && hc >= 0 && pts.size() > 1) {
      s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (const Point& p : pts) s << fixed(sx(p.x)) << ',' << fixed(sy(p.hi)) << ' ';
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) s << fixed(sx(it->x)) << ',' << fixed(sy(it->lo)) << ' ';
      s << "\"/>\n";
    }
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const Point& p : pts) s << fixed(sx(p.x)) << ',' << fixed(sy(p.y)) << ' ';
    s << "\"/>\n";
    for (const Point& p : pts) {
      s << "<circle cx=\"" << fixed(sx(p.x)) << "\" cy=\"" << fixed(sy(p.y)) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    }
    if (gc >= 0) {
      const double ly = kTop + 20.0 * static_cast<double>(g);
      s << "<line x1=\"" << fixed(kLeft + pw + 15) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(kLeft + pw + 40)
        << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(kLeft + pw + 45) << "\" y=\"" << fixed(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(plot.group + "=" + group_order[g])
        << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> emit(const RunRecord& record, const std::string& directory,
                              const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  const auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
  std::vector<std::string> written;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(Errc::kIo, "cannot create '" + directory + "': " + ec.message());
  const fs::path dir(directory);

  RunRecord summary = record;
  std::string failure;
  try {
    if (wants("csv")) {
      for (const MetricTable& t : record.metrics) {
        const fs::path p = dir / (t.name + ".csv");
        write_file(p, to_csv(t));
        written.push_back(p.string());
      }
    }
    if (wants("svg")) {
      for (const PlotSpec& plot : record.plots) {
        const MetricTable* t = record.find_table(plot.table);
        if (t == nullptr || t->rows.empty()) continue;
        const fs::path p = dir / (plot.name + ".svg");
        write_file(p, render_svg(record, plot));
        written.push_back(p.string());
      }
    }
  } catch (const Error& e) {
    failure = e.what();
    summary.partial = true;
    if (summary.error.empty()) summary.error = failure;
  }
  if (wants("json")) {
    const fs::path p = dir / "summary.json";
    write_file(p, to_json(summary));
    written.push_back(p.string());
  }
  if (!failure.empty()) throw Error(Errc::kIo, failure);
  return written;
}

}  // namespace depthlab
