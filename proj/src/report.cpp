#include "vitals/report.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "vitals/errors.hpp"

namespace vitals {

namespace {

using ordered_json = nlohmann::ordered_json;

// Numbers in every export go through format_real so CSV and JSON agree.
double rounded(double value) {
  auto text = format_real(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Keeps a JSON document inert inside <script>: "</" cannot close the element.
std::string script_safe(std::string text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '<' && i + 1 < text.size() && (text[i + 1] == '/' || text[i + 1] == '!')) {
      out += "\\u003c";
    } else {
      out += text[i];
    }
  }
  return out;
}

ordered_json pattern_json(const std::optional<PatternLabel>& pattern) {
  if (!pattern) return nullptr;
  ordered_json p;
  p["label"] = to_string(pattern->label);
  p["health_cv"] = rounded(pattern->health_cv);
  p["wealth_cv"] = rounded(pattern->wealth_cv);
  p["wealth_trend"] = rounded(pattern->wealth_trend);
  return p;
}

constexpr std::string_view kStyle = R"(body{font-family:system-ui,sans-serif;margin:2rem;color:#222}
h1{font-size:1.4rem;margin:0 0 .25rem}
.meta{color:#666;font-size:.85rem;margin:0 0 1rem}
#vitals-chart{min-height:480px}
.empty{padding:2rem;border:1px dashed #bbb;color:#555;text-align:center})";

}  // namespace

void ReportBundle::validate() const {
  for (const auto& p : projects) {
    const auto& s = p.series;
    if (s.months != months)
      throw DomainError(fmt::format("project {} does not share the bundle's month range", p.project_id));
    if (s.median_wf.size() != months.size() || s.gppr.size() != months.size() ||
        s.active_count.size() != months.size())
      throw DomainError(fmt::format("project {} has misaligned series", p.project_id));
  }
}

ReportBundle make_bundle(const EventStore& store, const std::vector<std::string>& projects, MonthIndex from,
                         MonthIndex to, const MetricsOptions& metrics, const PatternThresholds& thresholds) {
  if (from > to)
    throw InvalidRangeError(fmt::format("month range {}..{} is empty", format_month(from), format_month(to)));
  ReportBundle bundle;
  for (auto m = from; m <= to; ++m) bundle.months.push_back(m);
  auto classification = classify_all(store, projects, from, to, metrics, thresholds);
  auto ids = projects;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const auto& id : ids) {
    ProjectReport report{id, compute_series(store, id, from, to, metrics), std::nullopt};
    if (auto it = classification.labels.find(id); it != classification.labels.end()) report.pattern = it->second;
    bundle.projects.push_back(std::move(report));
  }
  return bundle;
}

std::string format_real(double value) {
  if (value == 0.0) return "0";  // also folds -0
  return fmt::format("{:.9g}", value);
}

std::string export_csv(const ReportBundle& bundle) {
  bundle.validate();
  std::vector<const ProjectReport*> order;
  for (const auto& p : bundle.projects) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->project_id < b->project_id; });

  std::string out = "project,year,month,median_wf,gppr,active_contributors\n";
  for (const auto* p : order) {
    const auto& s = p->series;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += fmt::format("{},{},{},{},{},{}\n", p->project_id, s.months[i].year(), s.months[i].month(),
                         format_real(s.median_wf[i]), format_real(s.gppr[i]), s.active_count[i]);
    }
  }
  return out;
}

std::string export_json(const ReportBundle& bundle) {
  bundle.validate();
  ordered_json doc;
  doc["months"] = ordered_json::array();
  for (auto m : bundle.months) doc["months"].push_back(format_month(m));
  doc["projects"] = ordered_json::array();

  std::vector<const ProjectReport*> order;
  for (const auto& p : bundle.projects) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->project_id < b->project_id; });
  for (const auto* p : order) {
    ordered_json entry;
    entry["id"] = p->project_id;
    auto wf = ordered_json::array();
    auto gp = ordered_json::array();
    auto active = ordered_json::array();
    for (std::size_t i = 0; i < p->series.size(); ++i) {
      wf.push_back(rounded(p->series.median_wf[i]));
      gp.push_back(rounded(p->series.gppr[i]));
      active.push_back(p->series.active_count[i]);
    }
    entry["median_wf"] = std::move(wf);
    entry["gppr"] = std::move(gp);
    entry["active"] = std::move(active);
    entry["pattern"] = pattern_json(p->pattern);
    doc["projects"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

ReportBundle parse_json_bundle(std::string_view text) {
  using nlohmann::json;
  ReportBundle bundle;
  try {
    auto doc = json::parse(text);
    for (const auto& m : doc.at("months")) bundle.months.push_back(parse_month(m.get<std::string>()));
    for (const auto& entry : doc.at("projects")) {
      ProjectReport p;
      p.project_id = entry.at("id").get<std::string>();
      p.series.project_id = p.project_id;
      p.series.months = bundle.months;
      p.series.median_wf = entry.at("median_wf").get<std::vector<double>>();
      p.series.gppr = entry.at("gppr").get<std::vector<double>>();
      p.series.active_count = entry.at("active").get<std::vector<std::int64_t>>();
      if (const auto& pattern = entry.at("pattern"); !pattern.is_null()) {
        p.pattern = PatternLabel{parse_pattern(pattern.at("label").get<std::string>()),
                                 pattern.at("health_cv").get<double>(), pattern.at("wealth_cv").get<double>(),
                                 pattern.at("wealth_trend").get<double>()};
      }
      bundle.projects.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("invalid report document: {}", e.what()));
  }
  bundle.validate();
  return bundle;
}

std::string render_html(const ReportBundle& bundle, std::string_view chart_asset, std::string_view title) {
  if (chart_asset.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ChartAssetMissing(
        "chart script is missing; build the chart component (see README, \"Chart asset\") and pass it with "
        "--chart-asset PATH or VITALS_CHART_ASSET");

  std::string snapshot;
  for (const auto& [key, value] : bundle.config_snapshot) {
    if (!snapshot.empty()) snapshot += "; ";
    snapshot += fmt::format("{}={}", key, value);
  }
  std::string range = bundle.months.empty()
                          ? std::string("no months")
                          : fmt::format("{} to {}", format_month(bundle.months.front()), format_month(bundle.months.back()));

  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += fmt::format("<title>{} - Health vs Wealth</title>\n", html_escape(title));
  out += fmt::format("<meta name=\"generator\" content=\"vitals {}\">\n", html_escape(bundle.tool_version));
  if (!snapshot.empty()) out += fmt::format("<meta name=\"vitals-config\" content=\"{}\">\n", html_escape(snapshot));
  out += fmt::format("<style>\n{}\n</style>\n</head>\n<body>\n", kStyle);
  out += fmt::format("<h1>{}: Health vs Wealth</h1>\n", html_escape(title));
  out += fmt::format("<p class=\"meta\">{} project(s), {}. x = GPPR (Wealth), y = median WF (Health), "
                     "bubble size = active contributors.</p>\n",
                     bundle.projects.size(), html_escape(range));
  out += fmt::format("<div id=\"{}\"></div>\n", kChartElementId);
  if (bundle.projects.empty()) out += "<p class=\"empty\">No projects to display.</p>\n";
  out += fmt::format("<script type=\"application/json\" id=\"{}\">\n{}</script>\n", kDataElementId,
                     script_safe(export_json(bundle)));
  out += "<script>\n";
  out += chart_asset;
  if (!chart_asset.ends_with('\n')) out += '\n';
  out += "</script>\n</body>\n</html>\n";
  return out;
}

std::optional<std::string> extract_data_block(std::string_view html) {
  auto open = fmt::format("id=\"{}\">", kDataElementId);
  auto start = html.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  start += open.size();
  auto end = html.find("</script>", start);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(html.substr(start, end - start));
}

}  // namespace vitals
