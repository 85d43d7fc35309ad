#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "rmsn/experiments.hpp"
#include "rmsn/instance_io.hpp"

namespace rmsn {

namespace {

std::string num(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string percent(double fraction) { return num("%.10g", fraction * 100.0) + "%"; }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
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

struct Aggregate {
  double sum = 0.0;
  int optimal = 0;
  int infeasible = 0;
  double time = 0.0;
  int cells = 0;

  void add(const SweepCell& c) {
    if (c.status == CellStatus::optimal) {
      sum += c.costs.total;
      ++optimal;
    } else {
      ++infeasible;
    }
    time += c.solve_time_seconds;
    ++cells;
  }
  bool complete() const { return optimal > 0 && infeasible == 0; }
  double mean() const { return sum / optimal; }
};

using CellKey = std::tuple<int, int, double, double>;  // network, clients, puv, rate

std::map<CellKey, Aggregate> aggregate(const SweepResults& results) {
  std::map<CellKey, Aggregate> out;
  for (const auto& c : results.cells) out[{c.network_size, c.clients, c.puv, c.deviation_rate}].add(c);
  return out;
}

template <typename T>
std::vector<T> distinct(const SweepResults& results, T SweepCell::*field) {
  std::set<T> values;
  for (const auto& c : results.cells) values.insert(c.*field);
  return {values.begin(), values.end()};
}

// Levels from the configuration, plus any only present in the cells.
std::vector<double> rate_columns(const SweepResults& results) {
  std::set<double> rates(results.config.rate_levels.begin(), results.config.rate_levels.end());
  for (const auto& c : results.cells) rates.insert(c.deviation_rate);
  return {rates.begin(), rates.end()};
}

}  // namespace

std::string render_table_csv(const SweepResults& results, int clients, int first_row_number) {
  const auto rates = rate_columns(results);
  std::string out = "In.,|V|,PUV";
  for (double r : rates) out += "," + percent(r);
  out += ",Mean time (s)\n";

  const auto agg = aggregate(results);
  std::set<std::pair<int, double>> rows;
  for (const auto& c : results.cells)
    if (c.clients == clients) rows.insert({c.network_size, c.puv});

  int number = first_row_number;
  for (const auto& [network, puv] : rows) {
    out += std::to_string(number++) + "," + std::to_string(network) + "," + percent(puv);
    double time = 0.0;
    int cells = 0;
    for (double r : rates) {
      auto it = agg.find({network, clients, puv, r});
      if (it == agg.end()) {
        out += ",";
        continue;
      }
      const Aggregate& a = it->second;
      time += a.time;
      cells += a.cells;
      out += "," + (a.complete() ? num("%.2f", a.mean()) : std::string("infeasible"));
    }
    out += "," + (cells > 0 ? num("%.4f", time / cells) : std::string()) + "\n";
  }
  return out;
}

std::string render_chart_svg(const SweepResults& results) {
  const auto agg = aggregate(results);
  const auto clients = distinct(results, &SweepCell::clients);
  const auto networks = distinct(results, &SweepCell::network_size);
  const auto puvs = distinct(results, &SweepCell::puv);
  const auto rates = rate_columns(results);

  static const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
                                   "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"};
  const double panel_w = 360, panel_h = 240, margin_left = 70, margin_top = 60, gap = 30;
  const double plot_w = panel_w - 60, plot_h = panel_h - 70;
  const double width = margin_left + networks.size() * (panel_w + gap) + 20;
  const double height = margin_top + clients.size() * (panel_h + gap) + 20;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num("%.0f", std::max(width, 300.0)) +
         "\" height=\"" + num("%.0f", std::max(height, 120.0)) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num("%.1f", margin_left) + "\" y=\"22\" font-size=\"14\">Mean total cost by network size, PUV and deviation rate</text>\n";

  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double x = margin_left + 110.0 * i;
    svg += "<rect x=\"" + num("%.1f", x) + "\" y=\"32\" width=\"12\" height=\"12\" fill=\"" + kPalette[i % 10] + "\"/>\n";
    svg += "<text x=\"" + num("%.1f", x + 16) + "\" y=\"42\">rate " + xml_escape(percent(rates[i])) + "</text>\n";
  }

  for (std::size_t row = 0; row < clients.size(); ++row) {
    for (std::size_t col = 0; col < networks.size(); ++col) {
      const double px = margin_left + col * (panel_w + gap);
      const double py = margin_top + row * (panel_h + gap);
      double top = 0.0;
      for (double p : puvs)
        for (double r : rates)
          if (auto it = agg.find({networks[col], clients[row], p, r}); it != agg.end() && it->second.complete())
            top = std::max(top, it->second.mean());
      if (top <= 0.0) top = 1.0;

      const double base_y = py + 30 + plot_h;
      svg += "<g>\n";
      svg += "<text x=\"" + num("%.1f", px) + "\" y=\"" + num("%.1f", py + 14) + "\" font-size=\"12\">" +
             std::to_string(clients[row]) + (clients[row] == 1 ? " client" : " clients") + ", |V| = " +
             std::to_string(networks[col]) + "</text>\n";
      svg += "<line x1=\"" + num("%.1f", px) + "\" y1=\"" + num("%.1f", base_y) + "\" x2=\"" + num("%.1f", px + plot_w) +
             "\" y2=\"" + num("%.1f", base_y) + "\" stroke=\"black\"/>\n";
      svg += "<line x1=\"" + num("%.1f", px) + "\" y1=\"" + num("%.1f", py + 30) + "\" x2=\"" + num("%.1f", px) +
             "\" y2=\"" + num("%.1f", base_y) + "\" stroke=\"black\"/>\n";
      svg += "<text x=\"" + num("%.1f", px - 4) + "\" y=\"" + num("%.1f", py + 34) + "\" text-anchor=\"end\">" +
             num("%.0f", top) + "</text>\n";
      svg += "<text x=\"" + num("%.1f", px - 4) + "\" y=\"" + num("%.1f", base_y) + "\" text-anchor=\"end\">0</text>\n";

      const double group_w = puvs.empty() ? plot_w : plot_w / puvs.size();
      const double bar_w = rates.empty() ? 0.0 : (group_w - 8) / rates.size();
      for (std::size_t g = 0; g < puvs.size(); ++g) {
        const double gx = px + g * group_w + 4;
        for (std::size_t s = 0; s < rates.size(); ++s) {
          auto it = agg.find({networks[col], clients[row], puvs[g], rates[s]});
          if (it == agg.end() || !it->second.complete()) continue;
          const double h = plot_h * it->second.mean() / top;
          svg += "<rect x=\"" + num("%.2f", gx + s * bar_w) + "\" y=\"" + num("%.2f", base_y - h) + "\" width=\"" +
                 num("%.2f", bar_w) + "\" height=\"" + num("%.2f", h) + "\" fill=\"" + kPalette[s % 10] + "\"><title>" +
                 xml_escape("PUV " + percent(puvs[g]) + ", rate " + percent(rates[s]) + ": " + num("%.2f", it->second.mean())) +
                 "</title></rect>\n";
        }
        svg += "<text x=\"" + num("%.1f", gx + (group_w - 8) / 2) + "\" y=\"" + num("%.1f", base_y + 14) +
               "\" text-anchor=\"middle\">" + xml_escape(percent(puvs[g])) + "</text>\n";
      }
      svg += "<text x=\"" + num("%.1f", px + plot_w / 2) + "\" y=\"" + num("%.1f", base_y + 30) +
             "\" text-anchor=\"middle\">PUV</text>\n";
      svg += "</g>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_metrics_csv(const ResilienceMetrics& metrics) {
  std::string out = "|V|,clients,PUV,deviation_rate,seed,total,baseline,absolute_change,relative_change\n";
  for (const auto& r : metrics.rows)
    out += std::to_string(r.network_size) + "," + std::to_string(r.clients) + "," + num("%.10g", r.puv) + "," +
           num("%.10g", r.deviation_rate) + "," + std::to_string(r.seed) + "," + num("%.6f", r.total) + "," +
           num("%.6f", r.baseline) + "," + num("%.6f", r.absolute_change) + "," + num("%.9f", r.relative_change) + "\n";
  return out;
}

std::string render_robustness_csv(const ResilienceMetrics& metrics) {
  std::string out = "|V|,clients,robustness_degree\n";
  for (const auto& d : metrics.robustness)
    out += std::to_string(d.network_size) + "," + std::to_string(d.clients) + "," +
           (d.degree ? num("%.10g", *d.degree) : std::string()) + "\n";
  return out;
}

ReportFiles render_report(const SweepResults& results, const std::filesystem::path& out_dir, double threshold) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw Error("cannot create output directory " + out_dir.string() + (ec ? ": " + ec.message() : ""));

  std::set<int> levels(results.config.client_levels.begin(), results.config.client_levels.end());
  for (const auto& c : results.cells) levels.insert(c.clients);

  ReportFiles files;
  int first = 1;
  for (int k : levels) {
    const auto path = out_dir / ("table_" + std::to_string(k) + "clients.csv");
    write_text(path, render_table_csv(results, k, first));
    std::set<std::pair<int, double>> rows;
    for (const auto& c : results.cells)
      if (c.clients == k) rows.insert({c.network_size, c.puv});
    first += static_cast<int>(rows.size());
    files.tables.push_back(path);
  }
  files.chart = out_dir / "figure.svg";
  write_text(files.chart, render_chart_svg(results));
  const ResilienceMetrics metrics = resilience_metrics(results, threshold);
  files.metrics = out_dir / "metrics.csv";
  write_text(files.metrics, render_metrics_csv(metrics));
  files.robustness = out_dir / "robustness.csv";
  write_text(files.robustness, render_robustness_csv(metrics));
  return files;
}

}  // namespace rmsn
