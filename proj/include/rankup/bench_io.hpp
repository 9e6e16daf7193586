#pragma once

// Bench config as JSON, records as CSV / aligned text, winner grid as SVG.

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rankup/bench.hpp"

namespace rankup::bench {

inline constexpr const char* kCsvHeader =
    "s,k,method,reps,mean_time_s,median_time_s,error_frobenius,cond";

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Parses the JSON document; unknown keys are rejected so typos surface.
inline BenchConfig config_from_json(const nlohmann::json& doc) {
  auto bad = [](const std::string& why) { throw Error(Errc::invalid_config, why); };
  if (!doc.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known{
      "S",         "sizes",          "basis", "ks",        "reps",         "rep_budget_s",
      "rep_reduction", "max_cell_time_s", "seed", "data_mode", "distribution", "methods",
      "ridge",     "warmup",         "serial_timing"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) bad("unknown config key '" + key + "'");
  }
  BenchConfig c;
  try {
    if (doc.contains("S")) c.S = doc.at("S").get<std::size_t>();
    if (doc.contains("sizes") || doc.contains("basis")) c.sizes.clear();
    if (doc.contains("sizes")) {
      for (const auto& s : doc.at("sizes")) c.sizes.push_back(SizeSpec::from_s(s.get<std::size_t>()));
    }
    if (doc.contains("basis")) {
      for (const auto& pair : doc.at("basis")) {
        if (!pair.is_array() || pair.size() != 2) bad("basis entries must be [d, n] pairs");
        c.sizes.push_back(SizeSpec::from_basis(pair[0].get<std::size_t>(), pair[1].get<std::size_t>()));
      }
    }
    if (doc.contains("ks")) c.ks = doc.at("ks").get<std::vector<std::size_t>>();
    if (doc.contains("reps")) c.reps = doc.at("reps").get<std::size_t>();
    if (doc.contains("rep_budget_s")) c.rep_budget_s = doc.at("rep_budget_s").get<double>();
    if (doc.contains("rep_reduction")) c.rep_reduction = doc.at("rep_reduction").get<std::size_t>();
    if (doc.contains("max_cell_time_s")) c.max_cell_time_s = doc.at("max_cell_time_s").get<double>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("data_mode")) {
      const auto mode = doc.at("data_mode").get<std::string>();
      if (mode == "random_design") {
        c.data_mode = DataMode::RANDOM_DESIGN;
      } else if (mode == "embedded") {
        c.data_mode = DataMode::EMBEDDED;
      } else {
        bad("data_mode must be 'random_design' or 'embedded'");
      }
    }
    if (doc.contains("distribution")) {
      const auto dist = doc.at("distribution").get<std::string>();
      if (dist == "gaussian") {
        c.distribution = Distribution::GAUSSIAN;
      } else if (dist == "uniform") {
        c.distribution = Distribution::UNIFORM;
      } else {
        bad("distribution must be 'gaussian' or 'uniform'");
      }
    }
    if (doc.contains("methods")) {
      c.methods.clear();
      for (const auto& m : doc.at("methods")) {
        auto parsed = parse_method(m.get<std::string>());
        if (!parsed || *parsed == UpdateMethod::AUTO) bad("methods must be DI, ISM or WMI");
        c.methods.push_back(*parsed);
      }
    }
    if (doc.contains("ridge")) c.ridge = doc.at("ridge").get<double>();
    if (doc.contains("warmup")) c.warmup = doc.at("warmup").get<bool>();
    if (doc.contains("serial_timing")) c.serial_timing = doc.at("serial_timing").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
  validate(c);
  return c;
}

inline BenchConfig config_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  return config_from_json(doc);
}

inline nlohmann::json config_to_json(const BenchConfig& c) {
  nlohmann::json doc;
  doc["S"] = c.S;
  nlohmann::json sizes = nlohmann::json::array();
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& s : c.sizes) {
    if (s.degree) {
      basis.push_back({s.degree->first, s.degree->second});
    } else {
      sizes.push_back(s.s);
    }
  }
  if (!sizes.empty()) doc["sizes"] = sizes;
  if (!basis.empty()) doc["basis"] = basis;
  doc["ks"] = c.ks;
  doc["reps"] = c.reps;
  doc["rep_budget_s"] = c.rep_budget_s;
  doc["rep_reduction"] = c.rep_reduction;
  doc["max_cell_time_s"] = c.max_cell_time_s;
  doc["seed"] = c.seed;
  doc["data_mode"] = c.data_mode == DataMode::RANDOM_DESIGN ? "random_design" : "embedded";
  doc["distribution"] = c.distribution == Distribution::GAUSSIAN ? "gaussian" : "uniform";
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  doc["methods"] = methods;
  doc["ridge"] = c.ridge;
  doc["warmup"] = c.warmup;
  doc["serial_timing"] = c.serial_timing;
  return doc;
}

inline std::string csv_row(const BenchRecord& r) {
  std::ostringstream row;
  row << r.s << ',' << r.k << ',' << to_string(r.method) << ',' << r.reps << ','
      << format_g9(r.mean_time_s) << ',' << format_g9(r.median_time_s) << ','
      << format_g9(r.error_frobenius) << ',' << format_g9(r.cond);
  return row.str();
}

inline void write_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

inline void write_pretty(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << std::setw(6) << "s" << std::setw(7) << "k" << std::setw(8) << "method" << std::setw(6)
      << "reps" << std::setw(16) << "mean_time_s" << std::setw(16) << "median_time_s"
      << std::setw(17) << "error_frobenius" << std::setw(16) << "cond" << '\n';
  for (const auto& r : records) {
    out << std::setw(6) << r.s << std::setw(7) << r.k << std::setw(8) << to_string(r.method)
        << std::setw(6) << r.reps << std::setw(16) << format_g9(r.mean_time_s) << std::setw(16)
        << format_g9(r.median_time_s) << std::setw(17) << format_g9(r.error_frobenius)
        << std::setw(16) << format_g9(r.cond);
    if (!r.ok()) out << "  FAILED: " << r.failure;
    out << '\n';
  }
}

inline void write_winners_csv(const std::map<std::pair<std::size_t, std::size_t>, UpdateMethod>& winners,
                              std::ostream& out) {
  out << "s,k,winner\n";
  for (const auto& [key, method] : winners) {
    out << key.first << ',' << key.second << ',' << to_string(method) << '\n';
  }
}

// One coloured cell per (s, k): ISM green, WMI blue, DI red.
inline void write_svg(const std::map<std::pair<std::size_t, std::size_t>, UpdateMethod>& winners,
                      std::ostream& out) {
  std::set<std::size_t> s_values;
  std::set<std::size_t> k_values;
  for (const auto& [key, _] : winners) {
    s_values.insert(key.first);
    k_values.insert(key.second);
  }
  const std::vector<std::size_t> ss(s_values.begin(), s_values.end());
  const std::vector<std::size_t> kk(k_values.begin(), k_values.end());
  constexpr int cell = 28;
  constexpr int left = 70;
  constexpr int top = 30;
  constexpr int bottom = 70;
  const int width = left + cell * static_cast<int>(kk.size()) + 120;
  const int height = top + cell * static_cast<int>(ss.size()) + bottom;
  auto colour = [](UpdateMethod m) {
    switch (m) {
      case UpdateMethod::ISM: return "#2ca02c";
      case UpdateMethod::WMI: return "#1f77b4";
      case UpdateMethod::DI: return "#d62728";
      default: return "#888888";
    }
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">Fastest update method per (s, k)</text>\n";
  for (std::size_t row = 0; row < ss.size(); ++row) {
    // largest s on top
    const std::size_t s = ss[ss.size() - 1 - row];
    const int y = top + cell * static_cast<int>(row);
    out << "<text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4
        << "\" text-anchor=\"end\">" << s << "</text>\n";
    for (std::size_t col = 0; col < kk.size(); ++col) {
      auto it = winners.find({s, kk[col]});
      if (it == winners.end()) continue;
      out << "<rect x=\"" << left + cell * static_cast<int>(col) << "\" y=\"" << y
          << "\" width=\"" << cell - 1 << "\" height=\"" << cell - 1 << "\" fill=\""
          << colour(it->second) << "\"><title>s=" << s << " k=" << kk[col] << ' '
          << to_string(it->second) << "</title></rect>\n";
    }
  }
  const int axis_y = top + cell * static_cast<int>(ss.size()) + 12;
  for (std::size_t col = 0; col < kk.size(); ++col) {
    const int x = left + cell * static_cast<int>(col) + cell / 2;
    out << "<text x=\"" << x << "\" y=\"" << axis_y << "\" text-anchor=\"end\" transform=\"rotate(-60 "
        << x << ' ' << axis_y << ")\">" << kk[col] << "</text>\n";
  }
  out << "<text x=\"" << left + cell * static_cast<int>(kk.size()) / 2 << "\" y=\"" << height - 6
      << "\" text-anchor=\"middle\">k</text>\n";
  out << "<text x=\"14\" y=\"" << top + cell * static_cast<int>(ss.size()) / 2
      << "\" text-anchor=\"middle\">s</text>\n";
  const int legend_x = left + cell * static_cast<int>(kk.size()) + 16;
  int legend_y = top;
  for (auto m : {UpdateMethod::ISM, UpdateMethod::WMI, UpdateMethod::DI}) {
    out << "<rect x=\"" << legend_x << "\" y=\"" << legend_y << "\" width=\"12\" height=\"12\" fill=\""
        << colour(m) << "\"/><text x=\"" << legend_x + 18 << "\" y=\"" << legend_y + 10 << "\">"
        << to_string(m) << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace rankup::bench
