#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdot/codec.hpp"
#include "rdot/dataset.hpp"
#include "rdot/error.hpp"
#include "rdot/io_util.hpp"
#include "rdot/trainer.hpp"
#include "rdot/transform.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string rd_csv(std::span<const rdot::RDPoint> points) {
  std::string csv = "qp,bits_per_block,psnr,sse\n";
  for (const rdot::RDPoint& p : points) {
    csv += std::to_string(p.qp) + "," + fmt(p.bits_per_block) + "," + fmt(p.psnr) + "," +
           fmt(p.sse) + "\n";
  }
  return csv;
}

int mode_index(rdot::ModeLabel mode) {
  for (size_t i = 0; i < rdot::kAllModes.size(); ++i) {
    if (rdot::kAllModes[i] == mode) return int(i);
  }
  return 0;
}

std::vector<std::string> all_mode_names() {
  std::vector<std::string> names;
  for (rdot::ModeLabel m : rdot::kAllModes) names.emplace_back(rdot::mode_name(m));
  return names;
}

struct GenDataArgs {
  std::vector<std::string> modes = all_mode_names();
  int blocks = 10000;
  int size = 8;
  uint64_t seed = 1;
  std::string out_dir = ".";
};

void run_gen_data(const GenDataArgs& a) {
  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  for (const std::string& name : a.modes) {
    const rdot::ModeLabel mode = rdot::mode_from_name(name);
    // Per-mode seeds are offset by the mode's fixed index so one master
    // seed yields distinct but reproducible streams per mode.
    const uint64_t seed = a.seed + uint64_t(mode_index(mode));
    const rdot::ResidualDataset ds =
        rdot::synth_residuals(mode, a.blocks, a.size, rdot::default_synth_params(mode), seed);
    const fs::path path = fs::path(a.out_dir) / (name + ".rsd");
    rdot::write_dataset(ds, path);
    std::printf("%s mode=%s blocks=%d size=%d seed=%llu\n", path.string().c_str(), name.c_str(),
                a.blocks, a.size, static_cast<unsigned long long>(seed));
  }
}

struct TrainArgs {
  std::string input;
  std::string output;
  std::string report_path;
  std::string method = "joint";
  std::string learner = "spgt";
  int qp = 28;
  int max_iter = 100;
  double tol = 1e-6;
  double beta = 1e-4;
  int n_secondary = 0;
};

void run_train(const TrainArgs& a) {
  const rdot::ResidualDataset ds = rdot::read_dataset(a.input);
  const rdot::QuantConfig q = rdot::QuantConfig::from_qp(a.qp);
  const rdot::Learner learner =
      a.learner == "spgt" ? rdot::Learner::kSpgt : rdot::Learner::kSepKlt;
  rdot::TrainOptions opt;
  opt.max_iter = a.max_iter;
  opt.tol = a.tol;
  opt.beta = a.beta;
  opt.n_secondary = a.n_secondary;

  rdot::TrainResult r = a.method == "joint" ? rdot::train_joint(ds.blocks, q, learner, opt)
                                            : rdot::train_tree(ds.blocks, q, learner, opt);
  r.bank.mode_label = std::string(rdot::mode_name(ds.mode));
  rdot::save_bank(r.bank, a.output);

  std::filesystem::path report_path = a.report_path;
  if (report_path.empty()) {
    report_path = std::filesystem::path(a.output).replace_extension(".report.json");
  }
  rdot::io::atomic_write(report_path, r.report.to_json());

  std::printf("RD_Total=%.17g converged=%s iterations=%zu bank=%s report=%s\n",
              r.report.iterations.back(), r.report.converged ? "true" : "false",
              r.report.iterations.size(), a.output.c_str(), report_path.string().c_str());
}

struct EvalArgs {
  std::string bank_path;
  std::string data_path;
  std::string out_prefix;
  std::string label = "bank";
  std::vector<int> qps = {26, 27, 28, 29, 30, 31};
};

void run_eval(const EvalArgs& a) {
  const rdot::TransformBank bank = rdot::load_bank(a.bank_path);
  const rdot::ResidualDataset ds = rdot::read_dataset(a.data_path);
  if (ds.block_size != bank.block_size) {
    throw rdot::Error(rdot::ErrorCode::kDimensionMismatch,
                      "dataset block size does not match the bank");
  }
  const std::vector<rdot::RDPoint> bank_curve = rdot::evaluate(ds.blocks, bank, a.qps);
  const std::vector<rdot::RDPoint> base_curve = rdot::evaluate_baseline(ds.blocks, a.qps);
  const rdot::BDRateResult bd = rdot::bd_rate(base_curve, bank_curve);

  rdot::io::atomic_write(a.out_prefix + ".bank.csv", rd_csv(bank_curve));
  rdot::io::atomic_write(a.out_prefix + ".baseline.csv", rd_csv(base_curve));

  ordered_json j;
  j["mode"] = std::string(rdot::mode_name(ds.mode));
  j["label"] = a.label;
  j["bd_rate_percent"] = bd.percent;
  j["psnr_low"] = bd.psnr_low;
  j["psnr_high"] = bd.psnr_high;
  rdot::io::atomic_write(a.out_prefix + ".bd.json", j.dump(2) + "\n");

  std::printf("bd_rate=%.6f%% over psnr [%.4f, %.4f] label=%s mode=%s\n", bd.percent, bd.psnr_low,
              bd.psnr_high, a.label.c_str(), std::string(rdot::mode_name(ds.mode)).c_str());
}

struct ReportArgs {
  std::string out_prefix;
  std::vector<std::string> inputs;
};

void run_report(const ReportArgs& a) {
  std::map<std::string, std::map<std::string, double>> grid;  // label -> mode -> bd%
  std::map<std::string, std::vector<double>> series;          // stem -> RD_Total trace

  for (const std::string& in : a.inputs) {
    const std::vector<uint8_t> bytes = rdot::io::read_file(in);
    json j;
    try {
      j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
      throw rdot::Error(rdot::ErrorCode::kInvalidParams, in + ": " + e.what());
    }
    if (j.contains("bd_rate_percent")) {
      grid[j.value("label", "bank")][j.value("mode", "DC")] = j["bd_rate_percent"].get<double>();
    } else if (j.contains("grid")) {
      for (const auto& [label, cells] : j["grid"].items()) {
        for (const auto& [mode, value] : cells.items()) {
          if (!value.is_null()) grid[label][mode] = value.get<double>();
        }
      }
      if (j.contains("series")) {
        for (const auto& [name, trace] : j["series"].items()) {
          series[name] = trace.get<std::vector<double>>();
        }
      }
    } else if (j.contains("iterations")) {
      series[std::filesystem::path(in).stem().string()] =
          j["iterations"].get<std::vector<double>>();
    } else {
      throw rdot::Error(rdot::ErrorCode::kInvalidParams, in + ": unrecognized report input");
    }
  }

  const std::vector<std::string> modes = all_mode_names();
  ordered_json out;
  out["modes"] = modes;
  out["grid"] = ordered_json::object();
  std::string csv = "method";
  for (const std::string& m : modes) csv += "," + m;
  csv += "\n";
  for (const auto& [label, cells] : grid) {
    ordered_json row = ordered_json::object();
    csv += label;
    for (const std::string& m : modes) {
      const auto it = cells.find(m);
      if (it == cells.end()) {
        row[m] = nullptr;
        csv += ",NA";
        std::fprintf(stderr, "warning: no BD-rate for method '%s', mode '%s'\n", label.c_str(),
                     m.c_str());
      } else {
        row[m] = it->second;
        csv += "," + fmt(it->second);
      }
    }
    csv += "\n";
    out["grid"][label] = std::move(row);
  }
  out["series"] = ordered_json::object();
  for (const auto& [name, trace] : series) out["series"][name] = trace;

  rdot::io::atomic_write(a.out_prefix + ".grid.json", out.dump(2) + "\n");
  rdot::io::atomic_write(a.out_prefix + ".grid.csv", csv);
  std::printf("%s.grid.json methods=%zu series=%zu\n", a.out_prefix.c_str(), grid.size(),
              series.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RD-optimized transform toolkit: synthetic residual datasets, "
               "Lloyd-trained transform banks, and BD-rate evaluation"};
  app.set_config("--config", "", "read options from an INI-style config file");
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-data", "generate synthetic residual datasets");
  cmd_gen->add_option("--modes", gen.modes, "intra-prediction mode names")
      ->delimiter(',')
      ->check(CLI::IsMember(all_mode_names()));
  cmd_gen->add_option("--blocks", gen.blocks, "blocks per mode")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--size", gen.size, "block size N")->check(CLI::IsMember({4, 8, 16, 32}));
  cmd_gen->add_option("--seed", gen.seed, "master RNG seed");
  cmd_gen->add_option("--out-dir", gen.out_dir, "output directory");
  cmd_gen->callback([&] { run_gen_data(gen); });

  TrainArgs train;
  CLI::App* cmd_train = app.add_subcommand("train", "train a six-slot transform bank");
  cmd_train->add_option("input", train.input, "RSD1 dataset")->required();
  cmd_train->add_option("output", train.output, "TBK1 bank to write")->required();
  cmd_train->add_option("--method", train.method, "clustering scheme")
      ->check(CLI::IsMember({"joint", "tree"}));
  cmd_train->add_option("--learner", train.learner, "learned-primary family")
      ->check(CLI::IsMember({"spgt", "sepklt"}));
  cmd_train->add_option("--qp", train.qp, "training QP");
  cmd_train->add_option("--max-iter", train.max_iter, "Lloyd iteration cap")
      ->check(CLI::PositiveNumber);
  cmd_train->add_option("--tol", train.tol, "relative RD_Total convergence threshold")
      ->check(CLI::PositiveNumber);
  cmd_train->add_option("--beta", train.beta, "path-graph regularizer")
      ->check(CLI::PositiveNumber);
  cmd_train->add_option("--n-secondary", train.n_secondary,
                        "secondary span n (0 = block-size default)")
      ->check(CLI::NonNegativeNumber);
  cmd_train->add_option("--report", train.report_path, "training report JSON path");
  cmd_train->callback([&] { run_train(train); });

  EvalArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "RD curves and BD-rate vs the DCT/ADST baseline");
  cmd_eval->add_option("bank", eval.bank_path, "TBK1 bank")->required();
  cmd_eval->add_option("data", eval.data_path, "RSD1 test dataset")->required();
  cmd_eval->add_option("out_prefix", eval.out_prefix, "output path prefix")->required();
  cmd_eval->add_option("--label", eval.label, "method label used in reports");
  cmd_eval->add_option("--qps", eval.qps, "evaluation QPs")->delimiter(',');
  cmd_eval->callback([&] {
    if (eval.qps.size() < 4) {
      throw CLI::ValidationError("--qps", "BD-rate needs at least 4 QP points");
    }
    run_eval(eval);
  });

  ReportArgs report;
  CLI::App* cmd_report = app.add_subcommand("report", "merge eval outputs into a method x mode grid");
  cmd_report->add_option("out_prefix", report.out_prefix, "output path prefix")->required();
  cmd_report->add_option("inputs", report.inputs, "eval/report JSON files")->required();
  cmd_report->callback([&] { run_report(report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const rdot::Error& e) {
    std::cerr << "error: " << e.what() << " [" << rdot::error_code_name(e.code()) << "]\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
