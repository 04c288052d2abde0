#include "rwprior/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rwprior/config.hpp"
#include "rwprior/harness/pgm.hpp"
#include "rwprior/ops.hpp"
#include "rwprior/presets.hpp"

namespace fs = std::filesystem;

namespace rwprior {

namespace {

std::string run_stem(const std::string& label, std::uint64_t seed) {
  return label + "__seed" + std::to_string(seed);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& s) {
  // strtod accepts "nan" and "inf", which mark aborted epochs.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::runtime_error("bad number '" + s + "' in results CSV");
  return v;
}

struct Job {
  std::string label;
  ExperimentConfig cfg;
  std::uint64_t seed;
};

void dump_images(const Job& job, const DenoiserModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  const ImageSet val = load_images(job.cfg.dataset, job.cfg.dataset.count, 1);
  const std::string stem = run_stem(job.label, job.seed);
  write_pgm((dir / (stem + "_clean.pgm")).string(), val.clean);
  write_pgm((dir / (stem + "_noisy.pgm")).string(), val.noisy);
  write_pgm((dir / (stem + "_denoised.pgm")).string(), model.forward(val.noisy));
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::size_t ExperimentSummary::aborted_runs() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.aborted; }));
}

const CellSummary* ExperimentSummary::cell(const std::string& label) const {
  for (const CellSummary& c : cells)
    if (c.config_label == label) return &c;
  return nullptr;
}

std::vector<std::string> cell_labels(const ExperimentConfig& cfg) {
  return cfg.cells.empty() ? std::vector<std::string>{"custom"} : cfg.cells;
}

std::string format_csv_row(const ResultRow& row) {
  const MetricsRecord& m = row.metrics;
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.3f", m.seconds);
  return row.config_label + "," + std::to_string(row.seed) + "," + std::to_string(m.epoch) + "," + fmt(m.base_loss) +
         "," + fmt(m.prior_loss) + "," + fmt(m.total_loss) + "," + fmt(m.val_psnr) + "," + fmt(m.val_ssim) + "," +
         secs;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != kCsvHeader) throw std::runtime_error("unexpected results CSV header: " + line);
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw std::runtime_error("results CSV row has " + std::to_string(f.size()) + " fields: " + line);
    ResultRow r;
    r.config_label = f[0];
    r.seed = std::stoull(f[1]);
    r.metrics.epoch = std::stoul(f[2]);
    r.metrics.base_loss = parse_double(f[3]);
    r.metrics.prior_loss = parse_double(f[4]);
    r.metrics.total_loss = parse_double(f[5]);
    r.metrics.val_psnr = parse_double(f[6]);
    r.metrics.val_ssim = parse_double(f[7]);
    r.metrics.seconds = parse_double(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

ExperimentSummary summarize(const std::vector<ResultRow>& rows) {
  ExperimentSummary out;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> run_index;
  std::vector<std::string> order;
  for (const ResultRow& r : rows) {
    const auto key = std::make_pair(r.config_label, r.seed);
    auto it = run_index.find(key);
    if (it == run_index.end()) {
      it = run_index.emplace(key, out.runs.size()).first;
      out.runs.push_back({r.config_label, r.seed});
      if (std::find(order.begin(), order.end(), r.config_label) == order.end()) order.push_back(r.config_label);
    }
    RunOutcome& run = out.runs[it->second];
    run.epochs = std::max(run.epochs, r.metrics.epoch);
    run.final_psnr = r.metrics.val_psnr;
    run.final_ssim = r.metrics.val_ssim;
    if (!std::isfinite(r.metrics.total_loss)) run.aborted = true;
  }

  for (const std::string& label : order) {
    CellSummary c;
    c.config_label = label;
    std::vector<double> p, s;
    for (const RunOutcome& r : out.runs) {
      if (r.config_label != label) continue;
      ++c.runs;
      if (r.aborted) {
        ++c.aborted;
        continue;
      }
      p.push_back(r.final_psnr);
      s.push_back(r.final_ssim);
    }
    c.psnr_mean = mean(p);
    c.psnr_std = sample_std(p);
    c.ssim_mean = mean(s);
    c.ssim_std = sample_std(s);
    out.cells.push_back(c);
  }

  const CellSummary* base = out.cell("original");
  if (base && base->runs > base->aborted) {
    const double bp = base->psnr_mean, bs = base->ssim_mean;
    for (CellSummary& c : out.cells) {
      if (c.runs == c.aborted) continue;
      c.delta_psnr = c.psnr_mean - bp;
      c.delta_ssim = c.ssim_mean - bs;
    }
  }
  return out;
}

std::string summary_to_json(const ExperimentSummary& summary) {
  using nlohmann::json;
  json cells = json::array();
  for (const CellSummary& c : summary.cells) {
    cells.push_back({{"config_label", c.config_label},
                     {"runs", c.runs},
                     {"aborted", c.aborted},
                     {"psnr_mean", c.psnr_mean},
                     {"psnr_std", c.psnr_std},
                     {"ssim_mean", c.ssim_mean},
                     {"ssim_std", c.ssim_std},
                     {"delta_psnr", c.delta_psnr ? json(*c.delta_psnr) : json(nullptr)},
                     {"delta_ssim", c.delta_ssim ? json(*c.delta_ssim) : json(nullptr)}});
  }
  json runs = json::array();
  for (const RunOutcome& r : summary.runs) {
    runs.push_back({{"config_label", r.config_label},
                    {"seed", r.seed},
                    {"status", r.aborted ? "aborted" : "ok"},
                    {"epochs", r.epochs},
                    {"final_psnr", std::isfinite(r.final_psnr) ? json(r.final_psnr) : json(nullptr)},
                    {"final_ssim", std::isfinite(r.final_ssim) ? json(r.final_ssim) : json(nullptr)}});
  }
  return json{{"baseline", summary.cell("original") ? json("original") : json(nullptr)},
              {"cells", cells},
              {"runs", runs}}
      .dump(2);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir / "runs", ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "config.json", serialize_config(cfg));

  std::vector<Job> jobs;
  for (const std::string& label : cell_labels(cfg)) {
    const ExperimentConfig cell = apply_cell(cfg, label);
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({label, cell, seed});
  }

  std::vector<std::vector<ResultRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      try {
        TrainResult tr = train(job.cfg, job.seed, [&](const MetricsRecord& m) {
          if (options.quiet) return;
          std::lock_guard lock(log_mutex);
          std::cerr << job.label << " seed " << job.seed << " epoch " << m.epoch << " loss " << m.total_loss
                    << " psnr " << m.val_psnr << "\n";
        });
        std::string csv = std::string(kCsvHeader) + "\n";
        for (const MetricsRecord& m : tr.records) {
          results[j].push_back({job.label, job.seed, m});
          csv += format_csv_row(results[j].back()) + "\n";
        }
        write_file(out_dir / "runs" / (run_stem(job.label, job.seed) + ".csv"), csv);
        if (options.dump_images) dump_images(job, tr.model, out_dir / "images");
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> all;
  std::string csv = std::string(kCsvHeader) + "\n";
  for (const auto& rows : results)
    for (const ResultRow& r : rows) {
      all.push_back(r);
      csv += format_csv_row(r) + "\n";
    }
  write_file(out_dir / "results.csv", csv);
  ExperimentSummary summary = summarize(all);
  write_file(out_dir / "summary.json", summary_to_json(summary));
  return summary;
}

ExperimentSummary analyze_directory(const std::string& dir) {
  const fs::path root(dir);
  std::vector<ResultRow> rows;
  if (fs::exists(root / "results.csv")) {
    rows = parse_csv(read_file(root / "results.csv"));
  } else if (fs::is_directory(root / "runs")) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(root / "runs"))
      if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      auto part = parse_csv(read_file(f));
      rows.insert(rows.end(), part.begin(), part.end());
    }
  } else {
    throw std::runtime_error("no results.csv or runs/ directory under " + dir);
  }
  ExperimentSummary summary = summarize(rows);
  write_file(root / "summary.json", summary_to_json(summary));
  return summary;
}

ExperimentConfig apply_seed_env(ExperimentConfig cfg, const char* env_value) {
  if (!env_value || !*env_value) return cfg;
  const std::string s(env_value);
  if (s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("MANIFOLD_LOSS_SEED: expected a non-negative integer, got '" + s + "'");
  try {
    cfg.seeds = {std::stoull(s)};
  } catch (const std::out_of_range&) {
    throw ConfigError("MANIFOLD_LOSS_SEED: value out of range");
  }
  return cfg;
}

}  // namespace rwprior
