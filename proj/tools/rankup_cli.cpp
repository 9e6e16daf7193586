// rankup: benchmark, threshold tables, Christoffel scoring and streaming
// detection on top of the rankup headers.
//
// Exit codes: 0 success, 2 usage, 3 data, 4 numerical failure.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankup/rankup.hpp"

namespace {

using namespace rankup;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(const Error& e) {
  switch (e.error_class()) {
    case ErrorClass::usage: return kExitUsage;
    case ErrorClass::data: return kExitData;
    case ErrorClass::numerical: return kExitNumerical;
  }
  return kExitData;
}

struct PointTable {
  std::size_t columns = 0;
  std::vector<double> values;  // row-major
  [[nodiscard]] std::size_t rows() const { return columns == 0 ? 0 : values.size() / columns; }
};

// One point per line, comma separated. Blank lines and '#' comments skipped.
PointTable read_points(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw Error(Errc::io, "cannot open " + path);
    in = &file;
  }
  PointTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::size_t cols = 0;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const char* begin = field.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == begin || *end != '\0' || errno == ERANGE) {
        throw Error(Errc::shape_mismatch, path + ":" + std::to_string(line_no) +
                                              ": not a number: '" + field + "'");
      }
      table.values.push_back(v);
      ++cols;
    }
    if (table.columns == 0) {
      table.columns = cols;
    } else if (cols != table.columns) {
      throw Error(Errc::shape_mismatch, path + ":" + std::to_string(line_no) + ": expected " +
                                            std::to_string(table.columns) + " columns, got " +
                                            std::to_string(cols));
    }
  }
  return table;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_score_row(std::size_t index, const ScoreReport& r) {
  std::cout << index << ',' << fmt17(r.inverse_cf) << ',' << fmt17(r.score) << ','
            << (r.is_outlier ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------- bench/grid

bench::BenchConfig load_bench_config(const std::string& path, bool has_path) {
  if (!has_path) return {};
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  std::stringstream text;
  text << in.rdbuf();
  return bench::config_from_json_text(text.str());
}

bench::BenchConfig default_grid_config() {
  bench::BenchConfig c;
  c.sizes.clear();
  for (std::size_t s : {10, 20, 50, 100, 250, 500, 750, 1000}) c.sizes.push_back(bench::SizeSpec::from_s(s));
  c.ks = {1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 100, 200, 300, 400, 500, 750, 1000};
  c.ridge = 1e-3;
  return c;
}

void report_progress(const bench::BenchRecord& r) {
  std::cerr << "s=" << r.s << " k=" << r.k << ' ' << to_string(r.method);
  if (r.ok()) {
    std::cerr << " median=" << bench::format_g9(r.median_time_s) << "s reps=" << r.reps << '\n';
  } else {
    std::cerr << " FAILED: " << r.failure << '\n';
  }
}

template <typename Writer>
void write_to(const std::string& path, Writer&& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
  writer(out);
}

int count_failures(const std::vector<bench::BenchRecord>& records) {
  int failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "cell s=" << r.s << " k=" << r.k << ' ' << to_string(r.method)
                << " failed: " << r.failure << '\n';
    }
  }
  return failed;
}

// ---------------------------------------------------------------- thresholds

std::size_t parse_size(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a positive integer: '" + text + "'");
  }
  if (pos != text.size() || v == 0 || text[0] == '-') {
    throw UsageError("not a positive integer: '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

void print_thresholds(const std::vector<std::size_t>& sizes, bool pretty, bool ratio) {
  auto f3 = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  if (pretty) {
    std::cout << std::setw(8) << "s" << std::setw(14) << "di_over_ism" << std::setw(20)
              << "di_over_wmi_cubic" << std::setw(24) << "di_over_wmi_empirical" << std::setw(16)
              << "rule_boundary" << '\n';
  } else {
    std::cout << "s,di_over_ism,di_over_wmi_cubic,di_over_wmi_empirical,rule_boundary\n";
  }
  for (auto s : sizes) {
    const double sd = static_cast<double>(s);
    const std::string cols[] = {f3(cost::threshold_di_over_ism(sd)),
                                f3(cost::threshold_di_over_wmi(sd)),
                                f3(cost::empirical_threshold_di_over_wmi(sd)),
                                std::to_string(s / 3)};
    if (pretty) {
      std::cout << std::setw(8) << s << std::setw(14) << cols[0] << std::setw(20) << cols[1]
                << std::setw(24) << cols[2] << std::setw(16) << cols[3] << '\n';
    } else {
      std::cout << s << ',' << cols[0] << ',' << cols[1] << ',' << cols[2] << ',' << cols[3] << '\n';
    }
  }
  if (ratio) {
    std::cout << "# s/k* least-squares fit over s in [1, 10000]: "
              << f3(cost::fitted_wmi_ratio(1, 10000)) << "; large-s limit "
              << std::setprecision(6) << cost::asymptotic_wmi_ratio() << "; reference "
              << cost::kEmpiricalWmiRatio << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-k inverse moment-matrix updates: benchmarks, thresholds, Christoffel scoring"};
  app.require_subcommand(1, 1);

  // bench / grid
  std::string config_path;
  std::string out_path;
  std::string records_path;
  std::string svg_path;
  std::uint64_t seed = 0;
  bool strict = false;
  bool serial_timing = true;
  bool pretty = false;

  auto* bench_cmd = app.add_subcommand("bench", "Time DI/ISM/WMI over a grid of (s, k) cells, write CSV");
  bench_cmd->add_option("--config", config_path, "JSON bench config (default: S=2000, d=8, n=5)");
  bench_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
  bench_cmd->add_option("--seed", seed, "Override the config seed");
  bench_cmd->add_flag("--strict", strict, "Exit nonzero if any cell fails");
  bench_cmd->add_flag("--serial-timing,!--no-serial-timing", serial_timing,
                      "Time one cell at a time (default on)");
  bench_cmd->add_flag("--pretty", pretty, "Aligned text instead of CSV");

  auto* grid_cmd = app.add_subcommand("grid", "Fastest method per (s, k)");
  grid_cmd->add_option("--config", config_path, "JSON bench config (default: s in {10..1000})");
  grid_cmd->add_option("--out", out_path, "Winner table path (default stdout)");
  grid_cmd->add_option("--records", records_path, "Also write the full record CSV here");
  grid_cmd->add_option("--svg", svg_path, "Write an SVG heatmap of the winners");
  grid_cmd->add_option("--seed", seed, "Override the config seed");
  grid_cmd->add_flag("--strict", strict, "Exit nonzero if any cell fails");
  grid_cmd->add_flag("--serial-timing,!--no-serial-timing", serial_timing,
                     "Time one cell at a time (default on)");
  grid_cmd->add_flag("--pretty", pretty, "Aligned record table on stdout");

  // thresholds
  std::vector<std::string> threshold_sizes;
  bool show_ratio = false;
  auto* thr_cmd = app.add_subcommand("thresholds", "DI-over-ISM / DI-over-WMI crossover values");
  thr_cmd->add_option("s", threshold_sizes, "Matrix sizes")->required();
  thr_cmd->add_flag("--pretty", pretty, "Aligned text instead of CSV");
  thr_cmd->add_flag("--ratio", show_ratio, "Also report the fitted s/k* constant");

  // score / stream
  std::string model_path;
  std::string points_path;
  double gamma = 0.0;
  std::size_t batch = 1;
  std::string method_text = "auto";
  std::string policy_text = "inliers";
  bool save = false;

  auto* score_cmd = app.add_subcommand("score", "Score points against a snapshot");
  score_cmd->add_option("--model", model_path, "Snapshot file")->required();
  score_cmd->add_option("--points", points_path, "CSV of points ('-' for stdin)")->required();
  score_cmd->add_option("--gamma", gamma, "Outlier level (default s_d(n))");

  auto* stream_cmd = app.add_subcommand("stream", "Score and learn from a point stream");
  stream_cmd->add_option("--model", model_path, "Snapshot file")->required();
  stream_cmd->add_option("--points", points_path, "CSV of points ('-' for stdin)")->required();
  stream_cmd->add_option("--gamma", gamma, "Outlier level (default s_d(n))");
  stream_cmd->add_option("--k", batch, "Points per rank-k update")->check(CLI::PositiveNumber);
  stream_cmd->add_option("--method", method_text, "di|ism|wmi|auto")
      ->check(CLI::IsMember({"di", "ism", "wmi", "auto"}));
  stream_cmd->add_option("--policy", policy_text, "always|inliers|never")
      ->check(CLI::IsMember({"always", "inliers", "never"}));
  stream_cmd->add_flag("--save", save, "Write the updated state back to --model");
  stream_cmd->add_option("--seed", seed, "Accepted for symmetry with bench; streaming draws no random numbers");

  // snapshot
  std::size_t degree = 0;
  double ridge = 0.0;
  bool track_matrix = false;
  std::uint32_t resym = 0;
  auto* snap_cmd = app.add_subcommand("snapshot", "Fit a snapshot from points, or describe one");
  snap_cmd->add_option("--points", points_path, "Training CSV");
  snap_cmd->add_option("--degree", degree, "Polynomial degree n");
  snap_cmd->add_option("--out", out_path, "Snapshot file to write");
  snap_cmd->add_option("--ridge", ridge, "Ridge added to the normalized moment matrix");
  snap_cmd->add_flag("--track-matrix", track_matrix, "Keep M_n(mu_N) so DI updates are allowed");
  snap_cmd->add_option("--resymmetrize", resym, "Symmetrize the inverse every T updates");
  snap_cmd->add_option("--model", model_path, "Describe an existing snapshot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (bench_cmd->parsed() || grid_cmd->parsed()) {
      const bool is_grid = grid_cmd->parsed();
      auto* cmd = is_grid ? grid_cmd : bench_cmd;
      const bool has_config = cmd->count("--config") > 0;
      bench::BenchConfig config = has_config ? load_bench_config(config_path, true)
                                             : (is_grid ? default_grid_config() : bench::BenchConfig{});
      if (cmd->count("--seed") > 0) config.seed = seed;
      config.serial_timing = serial_timing;
      bench::validate(config);

      if (is_grid) {
        const auto grid = bench::fastest_grid(config, report_progress);
        write_to(out_path, [&](std::ostream& o) { bench::write_winners_csv(grid.winners, o); });
        if (!records_path.empty()) {
          write_to(records_path, [&](std::ostream& o) { bench::write_csv(grid.records, o); });
        }
        if (pretty) bench::write_pretty(grid.records, std::cout);
        if (!svg_path.empty()) {
          write_to(svg_path, [&](std::ostream& o) { bench::write_svg(grid.winners, o); });
        }
        const int failed = count_failures(grid.records);
        return strict && failed > 0 ? kExitNumerical : kExitOk;
      }
      const auto records = bench::run_bench(config, report_progress);
      write_to(out_path, [&](std::ostream& o) {
        if (pretty) {
          bench::write_pretty(records, o);
        } else {
          bench::write_csv(records, o);
        }
      });
      const int failed = count_failures(records);
      return strict && failed > 0 ? kExitNumerical : kExitOk;
    }

    if (thr_cmd->parsed()) {
      std::vector<std::size_t> sizes;
      for (const auto& text : threshold_sizes) sizes.push_back(parse_size(text));
      print_thresholds(sizes, pretty, show_ratio);
      return kExitOk;
    }

    if (score_cmd->parsed() || stream_cmd->parsed()) {
      MomentState state = load_snapshot(model_path);
      const PointTable points = read_points(points_path);
      if (points.rows() > 0 && points.columns != state.basis().dimension()) {
        throw Error(Errc::shape_mismatch, "points have " + std::to_string(points.columns) +
                                              " columns, model expects d = " +
                                              std::to_string(state.basis().dimension()));
      }
      DetectorConfig dc;
      dc.d = state.basis().dimension();
      dc.n = state.basis().degree();
      auto* active = score_cmd->parsed() ? score_cmd : stream_cmd;
      if (active->count("--gamma") > 0) dc.gamma = gamma;
      std::cout << "index,inverse_cf,score,is_outlier\n";
      if (score_cmd->parsed()) {
        const double g = resolve_gamma(state, dc.gamma);
        for (std::size_t i = 0; i < points.rows(); ++i) {
          const std::span<const double> x(points.values.data() + i * points.columns, points.columns);
          print_score_row(i, score_value(inverse_cf(state, x), g));
        }
        return kExitOk;
      }
      dc.batch_size = batch;
      dc.method = *parse_method(method_text);
      dc.learn_policy = *parse_policy(policy_text);
      Detector detector(std::move(state), dc);
      for (std::size_t i = 0; i < points.rows(); ++i) {
        const std::span<const double> x(points.values.data() + i * points.columns, points.columns);
        print_score_row(i, detector.stream_step(x));
      }
      detector.flush();
      if (save) save_snapshot(detector.state(), model_path);
      return kExitOk;
    }

    if (snap_cmd->parsed()) {
      if (!model_path.empty()) {
        const MomentState state = load_snapshot(model_path);
        std::cout << "d=" << state.basis().dimension() << " n=" << state.basis().degree()
                  << " s=" << state.size() << " N=" << state.count() << " ridge=" << state.ridge()
                  << " track_matrix=" << (state.tracks_matrix() ? 1 : 0)
                  << " asymmetry=" << asymmetry(state.inverse()) << '\n';
        return kExitOk;
      }
      if (points_path.empty() || out_path.empty() || snap_cmd->count("--degree") == 0) {
        throw UsageError("snapshot needs --points, --degree and --out (or --model to describe)");
      }
      const PointTable points = read_points(points_path);
      if (points.rows() == 0) throw Error(Errc::empty_batch, "no training points");
      auto basis = std::make_shared<const MonomialBasis>(points.columns, degree);
      FitOptions options;
      options.ridge = ridge;
      options.track_matrix = track_matrix;
      options.resymmetrize_every = resym;
      const MomentState state = fit(std::span<const double>(points.values), basis, options);
      save_snapshot(state, out_path);
      std::cerr << "fitted s=" << state.size() << " on N=" << state.count() << " points\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
