// tools/teca_main.cc

// Copyright 2026 The teca authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: corpus simulation, feature statistics, training,
// inference, evaluation, attention analysis and the context-size sweep.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teca/config.h"
#include "teca/corpus.h"
#include "teca/errors.h"
#include "teca/manifest.h"
#include "teca/metrics.h"
#include "teca/network.h"
#include "teca/rng.h"
#include "teca/synth.h"
#include "teca/trainer.h"
#include "teca/wav_io.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace teca;

namespace {

void log_resolved_config(const RunConfig& cfg, const std::string& out_dir) {
  std::cout << "config hash " << cfg.hash() << "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "resolved_config.json");
    out << cfg.to_json_text() << "\n";
  }
}

std::vector<std::string> gather_inputs(const std::string& in_dir,
                                       const std::string& manifest_path,
                                       std::vector<PairRecord>* records) {
  std::vector<std::string> inputs;
  if (!manifest_path.empty()) {
    Manifest m = read_manifest(manifest_path);
    for (const PairRecord& r : m.records) {
      inputs.push_back(r.reverb_path);
      if (records) records->push_back(r);
    }
  } else if (!in_dir.empty()) {
    inputs = corpus::list_wavs(in_dir);
  }
  TECA_CHECK(!inputs.empty(), "no input WAV files found");
  return inputs;
}

// Utterance split by seeded shuffle; fractions are train,val,test.
struct SplitManifests {
  Manifest train, val, test;
};

SplitManifests split_manifest(const Manifest& all, double val_frac,
                              double test_frac, uint64_t seed) {
  std::vector<size_t> order(all.records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(Rng::derive(seed, 0x517EED));
  rng.shuffle(&order);
  const size_t n = order.size();
  const size_t n_val = static_cast<size_t>(n * val_frac);
  const size_t n_test = static_cast<size_t>(n * test_frac);
  SplitManifests out;
  out.train.config_hash = out.val.config_hash = out.test.config_hash =
      all.config_hash;
  for (size_t i = 0; i < n; ++i) {
    const PairRecord& r = all.records[order[i]];
    if (i < n_val) {
      out.val.records.push_back(r);
    } else if (i < n_val + n_test) {
      out.test.records.push_back(r);
    } else {
      out.train.records.push_back(r);
    }
  }
  return out;
}

int cmd_simulate(const RunConfig& cfg, const std::string& clean_dir,
                 int synth_count, double synth_duration,
                 const std::string& rir_dir, const std::string& out_dir,
                 double val_frac, double test_frac) {
  log_resolved_config(cfg, out_dir);
  std::vector<std::string> clean_paths;
  if (synth_count > 0) {
    const fs::path dir = fs::path(out_dir) / "clean";
    fs::create_directories(dir);
    for (int i = 0; i < synth_count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "synth%05d.wav", i);
      const std::string path = (dir / name).string();
      write_wav(path,
                synth_speech(Rng::derive(cfg.corpus.seed, 7000 + i),
                             synth_duration, cfg.sample_rate));
      clean_paths.push_back(path);
    }
  } else {
    TECA_CHECK(!clean_dir.empty(), "need --clean-dir or --synth");
    clean_paths = corpus::list_wavs(clean_dir);
    TECA_CHECK(!clean_paths.empty(), "no .wav files in " << clean_dir);
  }

  corpus::CorpusConfig ccfg = cfg.corpus;
  ccfg.sample_rate = cfg.sample_rate;
  ccfg.rir_dir = rir_dir;
  const Manifest manifest =
      corpus::build_corpus(clean_paths, ccfg, out_dir, cfg.hash());
  std::cout << "wrote " << manifest.records.size() << " pairs to " << out_dir
            << "\n";

  if (val_frac > 0.0 || test_frac > 0.0) {
    SplitManifests split =
        split_manifest(manifest, val_frac, test_frac, ccfg.seed);
    write_manifest((fs::path(out_dir) / "manifest_train.jsonl").string(),
                   split.train);
    write_manifest((fs::path(out_dir) / "manifest_val.jsonl").string(),
                   split.val);
    write_manifest((fs::path(out_dir) / "manifest_test.jsonl").string(),
                   split.test);
    std::cout << "split " << split.train.records.size() << "/"
              << split.val.records.size() << "/" << split.test.records.size()
              << " train/val/test\n";
  }
  return 0;
}

int cmd_stats(const RunConfig& cfg, const std::string& manifest_path,
              const std::string& out_path) {
  log_resolved_config(cfg, "");
  const Manifest manifest = read_manifest(manifest_path);
  TECA_CHECK(!manifest.records.empty(), "empty manifest");
  std::vector<Matrix> feats;
  for (const PairRecord& r : manifest.records) {
    feats.push_back(dsp::lps(
        dsp::stft(read_wav_checked(r.reverb_path, cfg.sample_rate), cfg.stft),
        cfg.power_floor));
  }
  const dsp::NormStats stats =
      dsp::compute_norm_stats(std::span<const Matrix>(feats));
  json j = {{"mean", stats.mean},
            {"std", stats.std},
            {"config_hash", cfg.hash()},
            {"frames", [&] {
               size_t n = 0;
               for (const Matrix& m : feats) n += m.rows();
               return n;
             }()}};
  std::ofstream out(out_path);
  TECA_CHECK(out.good(), "cannot write " << out_path);
  out << j.dump(2) << "\n";
  std::cout << "wrote per-bin statistics (" << stats.mean.size()
            << " bins) to " << out_path << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& train_path,
              const std::string& val_path, const std::string& out_dir) {
  log_resolved_config(cfg, out_dir);
  const Manifest train_manifest = read_manifest(train_path);
  const Manifest val_manifest = read_manifest(val_path);
  fs::create_directories(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  train::FitResult result = train::fit(
      train_manifest, val_manifest, cfg.train, cfg.model_spec(), cfg.stft,
      cfg.power_floor, cfg.sample_rate, cfg.hash(),
      [](const train::EpochLog& e) {
        std::cout << "epoch " << e.epoch << " lr " << e.lr << " train "
                  << e.train_loss << " val " << e.val_loss << " (derev "
                  << e.derev_term << ", rt60 " << e.rt60_term << ") "
                  << e.seconds << "s\n";
      });
  const double total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const std::string ckpt_path =
      (fs::path(out_dir) / "checkpoint.teca").string();
  net::save_checkpoint(result.model, ckpt_path);
  train::write_training_log(
      (fs::path(out_dir) / "train_log.jsonl").string(), result.log);
  std::cout << "best epoch " << result.best_epoch << " (val "
            << result.best_val_loss << "), " << total_s << "s total; wrote "
            << ckpt_path << "\n";
  return 0;
}

int cmd_infer(const std::string& ckpt_path, const std::string& in_dir,
              const std::string& manifest_path, const std::string& out_dir,
              bool dump_rt60) {
  const net::Model model = net::load_checkpoint(ckpt_path);
  std::cout << "checkpoint config hash " << model.config_hash << "\n";
  std::vector<std::string> inputs =
      gather_inputs(in_dir, manifest_path, nullptr);
  fs::create_directories(out_dir);

  std::optional<std::ofstream> rt60_out;
  if (dump_rt60) {
    TECA_CHECK(model.spec.rt60_head,
               "--dump-rt60 requires a checkpoint with the RT60 head");
    rt60_out.emplace(fs::path(out_dir) / "rt60_estimates.jsonl");
  }

  for (const std::string& path : inputs) {
    const Waveform y = read_wav_checked(path, model.sample_rate);
    const net::Prediction pred =
        net::predict_utterance(model, y, dump_rt60);
    const std::string out_path =
        (fs::path(out_dir) / fs::path(path).filename()).string();
    write_wav(out_path, pred.enhanced, WavFormat::kFloat32);
    if (rt60_out) {
      json j = {{"utt", fs::path(path).stem().string()},
                {"rt60_est", *pred.rt60_estimate},
                {"rt60_frames", pred.rt60_frames}};
      *rt60_out << j.dump() << "\n";
    }
  }
  std::cout << "enhanced " << inputs.size() << " files into " << out_dir
            << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& manifest_path,
             const std::string& enhanced_dir, const std::string& out_path) {
  log_resolved_config(cfg, "");
  const Manifest manifest = read_manifest(manifest_path);
  TECA_CHECK(!manifest.records.empty(), "empty manifest");

  std::vector<metrics::UtteranceMetrics> enhanced_rows, reverb_rows;
  for (const PairRecord& r : manifest.records) {
    const Waveform ref = read_wav_checked(r.anechoic_path, cfg.sample_rate);
    const Waveform rev = read_wav_checked(r.reverb_path, cfg.sample_rate);
    const std::string enh_path =
        (fs::path(enhanced_dir) / fs::path(r.reverb_path).filename())
            .string();
    const Waveform enh = read_wav_checked(enh_path, cfg.sample_rate);
    TECA_CHECK(enh.size() == ref.size(),
               "length mismatch for " << r.id << " (enhanced vs reference)");

    metrics::UtteranceMetrics me;
    me.id = r.id;
    me.rt60 = r.rt60;
    me.fwsegsnr_db = metrics::fwsegsnr(ref, enh);
    me.lsd_db = metrics::lsd_waveforms(ref, enh, cfg.stft, cfg.power_floor);
    enhanced_rows.push_back(me);

    metrics::UtteranceMetrics mr;
    mr.id = r.id;
    mr.rt60 = r.rt60;
    mr.fwsegsnr_db = metrics::fwsegsnr(ref, rev);
    mr.lsd_db = metrics::lsd_waveforms(ref, rev, cfg.stft, cfg.power_floor);
    reverb_rows.push_back(mr);
  }

  const metrics::MetricReport enhanced =
      metrics::bucket_report(std::move(enhanced_rows));
  const metrics::MetricReport reverb =
      metrics::bucket_report(std::move(reverb_rows));

  std::cout << metrics::format_report_table(reverb, "reverberant input");
  std::cout << metrics::format_report_table(enhanced, "enhanced output");

  std::ofstream out(out_path);
  TECA_CHECK(out.good(), "cannot write " << out_path);
  for (size_t i = 0; i < enhanced.utterances.size(); ++i) {
    const auto& e = enhanced.utterances[i];
    const auto& v = reverb.utterances[i];
    json j = {{"utt", e.id},          {"rt60", e.rt60},
              {"bucket", e.bucket},   {"fwsegsnr", e.fwsegsnr_db},
              {"lsd", e.lsd_db},      {"fwsegsnr_input", v.fwsegsnr_db},
              {"lsd_input", v.lsd_db}};
    out << j.dump() << "\n";
  }
  json summary = {{"summary", true},
                  {"config_hash", cfg.hash()},
                  {"mean_fwsegsnr", enhanced.mean_fwsegsnr},
                  {"mean_lsd", enhanced.mean_lsd},
                  {"mean_fwsegsnr_input", reverb.mean_fwsegsnr},
                  {"mean_lsd_input", reverb.mean_lsd},
                  {"pesq", nullptr},  // external measures, not computed
                  {"stoi", nullptr},
                  {"wer", nullptr}};
  out << summary.dump() << "\n";
  std::cout << "wrote per-utterance report to " << out_path << "\n";
  return 0;
}

int cmd_attention_report(const std::string& ckpt_path,
                         const std::string& manifest_path,
                         const std::string& out_csv,
                         const std::string& dump_weights) {
  const net::Model model = net::load_checkpoint(ckpt_path);
  std::cout << "checkpoint config hash " << model.config_hash << "\n";
  TECA_CHECK(model.spec.kind != net::ModelKind::kBaseline,
             "no attention weights");
  const Manifest manifest = read_manifest(manifest_path);
  TECA_CHECK(!manifest.records.empty(), "empty manifest");

  const int c = model.spec.context;
  const int n_bands = model.spec.bands();
  const int half = (c - 1) / 2;

  // mean weight accum per (bucket, band, offset)
  std::map<int, std::vector<double>> sums;
  std::map<int, int> counts;

  std::optional<std::ofstream> dump;
  if (!dump_weights.empty()) dump.emplace(dump_weights);

  for (const PairRecord& r : manifest.records) {
    const Waveform y = read_wav_checked(r.reverb_path, model.sample_rate);
    const Matrix w = net::utterance_attention_weights(model, y);
    const int bucket = metrics::rt60_bucket(r.rt60);
    auto& acc = sums[bucket];
    if (acc.empty()) acc.assign(static_cast<size_t>(n_bands) * c, 0.0);
    counts[bucket] += w.rows();
    for (int t = 0; t < w.rows(); ++t) {
      const double* row = w.row(t);
      for (int i = 0; i < n_bands * c; ++i) acc[i] += row[i];
      if (dump) {
        for (int b = 0; b < n_bands; ++b) {
          json j;
          j["utt"] = r.id;
          j["frame"] = t;
          j["rt60"] = r.rt60;
          if (n_bands > 1) j["band"] = b;
          std::vector<double> weights(row + b * c, row + (b + 1) * c);
          j["weights"] = weights;
          *dump << j.dump() << "\n";
        }
      }
    }
  }

  std::ofstream out(out_csv);
  TECA_CHECK(out.good(), "cannot write " << out_csv);
  out << (n_bands > 1 ? "offset,bucket,band,normalized_weight\n"
                      : "offset,bucket,normalized_weight\n");
  char buf[128];
  for (const auto& [bucket, acc] : sums) {
    for (int b = 0; b < n_bands; ++b) {
      const double center = acc[b * c + half];
      TECA_CHECK(center > 0, "degenerate attention mean at offset 0");
      for (int k = 0; k < c; ++k) {
        const double norm = acc[b * c + k] / center;
        if (n_bands > 1) {
          std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.10g\n", k - half,
                        bucket, b, norm);
        } else {
          std::snprintf(buf, sizeof(buf), "%d,%d,%.10g\n", k - half, bucket,
                        norm);
        }
        out << buf;
      }
    }
  }
  std::cout << "wrote mean attention weights for " << sums.size()
            << " RT60 buckets to " << out_csv << "\n";
  return 0;
}

int cmd_sweep_context(const RunConfig& base_cfg,
                      const std::string& train_path,
                      const std::string& val_path,
                      const std::string& eval_path,
                      const std::vector<int>& contexts,
                      const std::string& out_dir) {
  TECA_CHECK(!contexts.empty(), "need at least one context size");
  log_resolved_config(base_cfg, out_dir);
  const Manifest train_manifest = read_manifest(train_path);
  const Manifest val_manifest = read_manifest(val_path);
  const Manifest eval_manifest = read_manifest(eval_path);
  fs::create_directories(out_dir);

  std::ofstream table(fs::path(out_dir) / "sweep.jsonl");
  std::cout << "  c    meanLSD   meanfwSegSNR\n";
  for (int c : contexts) {
    RunConfig cfg = base_cfg;
    cfg.context = c;
    train::FitResult result =
        train::fit(train_manifest, val_manifest, cfg.train, cfg.model_spec(),
                   cfg.stft, cfg.power_floor, cfg.sample_rate, cfg.hash());

    double lsd_sum = 0.0, snr_sum = 0.0;
    for (const PairRecord& r : eval_manifest.records) {
      const Waveform y = read_wav_checked(r.reverb_path, cfg.sample_rate);
      const Waveform x = read_wav_checked(r.anechoic_path, cfg.sample_rate);
      const net::Prediction pred = net::predict_utterance(result.model, y);
      lsd_sum += metrics::lsd_waveforms(x, pred.enhanced, cfg.stft,
                                        cfg.power_floor);
      snr_sum += metrics::fwsegsnr(x, pred.enhanced);
    }
    const double n = static_cast<double>(eval_manifest.records.size());
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%3d %9.3f %12.3f\n", c, lsd_sum / n,
                  snr_sum / n);
    std::cout << buf;
    json j = {{"context", c},
              {"mean_lsd", lsd_sum / n},
              {"mean_fwsegsnr", snr_sum / n},
              {"best_epoch", result.best_epoch},
              {"best_val_loss", result.best_val_loss},
              {"config_hash", cfg.hash()}};
    table << j.dump() << "\n";
    net::save_checkpoint(result.model,
                         (fs::path(out_dir) / ("checkpoint_c" +
                                               std::to_string(c) + ".teca"))
                             .string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal-contextual attention speech dereverberation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);

  // Flag overrides shared by subcommands (flags win over the file).
  std::optional<std::string> opt_model;
  std::optional<int> opt_context, opt_subbands, opt_epochs, opt_batch;
  std::optional<uint64_t> opt_seed;
  std::optional<double> opt_lr;
  std::optional<bool> opt_rt60_head;
  app.add_option("--model", opt_model, "model kind: baseline|fta|sta");
  app.add_option("--context", opt_context, "context size c (odd)");
  app.add_option("--subbands", opt_subbands, "subband count N");
  app.add_option("--epochs", opt_epochs, "training epochs");
  app.add_option("--batch-size", opt_batch, "frames per mini-batch");
  app.add_option("--seed", opt_seed, "master seed");
  app.add_option("--lr", opt_lr, "initial learning rate");
  app.add_flag("--rt60-head,!--no-rt60-head", opt_rt60_head,
               "train the RT60 estimation head");

  auto* sim = app.add_subcommand("simulate", "render a reverberant corpus");
  std::string clean_dir, rir_dir, out_dir;
  int synth_count = 0;
  double synth_duration = 2.0, val_frac = 0.0, test_frac = 0.0;
  sim->add_option("--clean-dir", clean_dir, "directory of clean WAV files");
  sim->add_option("--synth", synth_count,
                  "generate this many synthetic clean utterances instead");
  sim->add_option("--synth-duration", synth_duration,
                  "seconds per synthetic utterance");
  sim->add_option("--rir-dir", rir_dir,
                  "use recorded responses from this directory");
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--val-frac", val_frac, "validation split fraction");
  sim->add_option("--test-frac", test_frac, "test split fraction");

  auto* stats = app.add_subcommand("stats", "per-bin feature statistics");
  std::string manifest_path, stats_out;
  stats->add_option("--manifest", manifest_path, "corpus manifest")
      ->required();
  stats->add_option("--out", stats_out, "output JSON path")->required();

  auto* train_cmd = app.add_subcommand("train", "train a model");
  std::string train_manifest, val_manifest;
  train_cmd->add_option("--train-manifest", train_manifest)->required();
  train_cmd->add_option("--val-manifest", val_manifest)->required();
  train_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* infer = app.add_subcommand("infer", "enhance WAV files");
  std::string ckpt_path, in_dir;
  bool dump_rt60 = false;
  infer->add_option("--checkpoint", ckpt_path)->required();
  infer->add_option("--in-dir", in_dir, "directory of reverberant WAVs");
  infer->add_option("--manifest", manifest_path,
                    "take inputs from a corpus manifest");
  infer->add_option("--out", out_dir, "output directory")->required();
  infer->add_flag("--dump-rt60", dump_rt60,
                  "write per-utterance RT60 diagnostics");

  auto* eval = app.add_subcommand("eval", "score enhanced output");
  std::string enhanced_dir, report_out;
  eval->add_option("--manifest", manifest_path)->required();
  eval->add_option("--enhanced-dir", enhanced_dir)->required();
  eval->add_option("--out", report_out, "report JSONL path")->required();

  auto* att = app.add_subcommand("attention-report",
                                 "mean attention weights per RT60 bucket");
  std::string att_csv, dump_weights;
  att->add_option("--checkpoint", ckpt_path)->required();
  att->add_option("--manifest", manifest_path)->required();
  att->add_option("--out", att_csv, "output CSV path")->required();
  att->add_option("--dump-weights", dump_weights,
                  "also dump per-frame weights as JSONL");

  auto* sweep = app.add_subcommand("sweep-context",
                                   "train/evaluate across context sizes");
  std::string eval_manifest;
  std::vector<int> contexts;
  sweep->add_option("--train-manifest", train_manifest)->required();
  sweep->add_option("--val-manifest", val_manifest)->required();
  sweep->add_option("--eval-manifest", eval_manifest)->required();
  sweep->add_option("--contexts", contexts, "context sizes, e.g. 1 3 5")
      ->required();
  sweep->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);

    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::load(config_path);
    if (opt_model) cfg.model = *opt_model;
    if (opt_context) cfg.context = *opt_context;
    if (opt_subbands) cfg.subbands = *opt_subbands;
    if (opt_epochs) cfg.train.max_epochs = *opt_epochs;
    if (opt_batch) cfg.train.batch_size = *opt_batch;
    if (opt_seed) {
      cfg.train.seed = *opt_seed;
      cfg.corpus.seed = *opt_seed;
    }
    if (opt_lr) cfg.train.lr_init = *opt_lr;
    if (opt_rt60_head) cfg.rt60_head = *opt_rt60_head;
    net::model_kind_from_string(cfg.model);  // usage-check before any I/O

    if (sim->parsed()) {
      return cmd_simulate(cfg, clean_dir, synth_count, synth_duration,
                          rir_dir, out_dir, val_frac, test_frac);
    }
    if (stats->parsed()) return cmd_stats(cfg, manifest_path, stats_out);
    if (train_cmd->parsed()) {
      return cmd_train(cfg, train_manifest, val_manifest, out_dir);
    }
    if (infer->parsed()) {
      return cmd_infer(ckpt_path, in_dir, manifest_path, out_dir, dump_rt60);
    }
    if (eval->parsed()) {
      return cmd_eval(cfg, manifest_path, enhanced_dir, report_out);
    }
    if (att->parsed()) {
      return cmd_attention_report(ckpt_path, manifest_path, att_csv,
                                  dump_weights);
    }
    if (sweep->parsed()) {
      return cmd_sweep_context(cfg, train_manifest, val_manifest,
                               eval_manifest, contexts, out_dir);
    }
    throw UsageError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
