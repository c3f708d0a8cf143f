// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "dsaug/corpus.hpp"
#include "dsaug/errors.hpp"
#include "dsaug/evaluation.hpp"
#include "dsaug/melfile.hpp"
#include "dsaug/model.hpp"
#include "dsaug/pause_model.hpp"
#include "dsaug/planner.hpp"
#include "dsaug/text_frontend.hpp"
#include "dsaug/toy_corpus.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flat `key = value` config file with '#' comments; unknown keys rejected.
std::map<std::string, std::string> parse_kv_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dsaug::DataError("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw dsaug::DataError(path + ":" + std::to_string(line_no) +
                             ": expected `key = value`");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw dsaug::DataError(path + ":" + std::to_string(line_no) +
                             ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

struct TrainRunConfig {
  dsaug::ModelConfig model;
  dsaug::TrainOptions options;
};

TrainRunConfig load_train_config(const std::string& path) {
  TrainRunConfig run;
  run.model = dsaug::toy::config();
  if (path.empty()) return run;
  auto as_int = [](const std::string& v) { return std::stoi(v); };
  auto as_double = [](const std::string& v) { return std::stod(v); };
  for (const auto& [key, value] : parse_kv_config(path)) {
    auto& m = run.model;
    if (key == "d_model") m.d_model = as_int(value);
    else if (key == "n_blocks_enc") m.n_blocks_enc = as_int(value);
    else if (key == "n_blocks_dec") m.n_blocks_dec = as_int(value);
    else if (key == "n_heads") m.n_heads = as_int(value);
    else if (key == "ffn_conv_width") m.ffn_conv_width = as_int(value);
    else if (key == "ffn_hidden") m.ffn_hidden = as_int(value);
    else if (key == "n_mels") m.n_mels = as_int(value);
    else if (key == "max_seq") m.max_seq = as_int(value);
    else if (key == "predictor_kernel") m.predictor_kernel = as_int(value);
    else if (key == "predictor_hidden") m.predictor_hidden = as_int(value);
    else if (key == "n_bins") m.n_bins = as_int(value);
    else if (key == "dropout_rate") m.dropout_rate = as_double(value);
    else if (key == "frame_seconds") m.frame_seconds = as_double(value);
    else if (key == "pitch_lo") m.pitch_lo = as_double(value);
    else if (key == "pitch_hi") m.pitch_hi = as_double(value);
    else if (key == "energy_lo") m.energy_lo = as_double(value);
    else if (key == "energy_hi") m.energy_hi = as_double(value);
    else if (key == "steps") run.options.steps = as_int(value);
    else if (key == "learning_rate") run.options.learning_rate = as_double(value);
    else if (key == "seed") run.options.seed = std::stoull(value);
    else throw dsaug::DataError(path + ": unknown config key '" + key + "'");
  }
  return run;
}

int cmd_ingest(const std::string& manifest, bool lenient) {
  const auto records = dsaug::parse_manifest(manifest, lenient);
  std::map<dsaug::RawSeverity, long> counts;
  for (const auto& r : records) counts[r.severity]++;
  std::cout << "records: " << records.size() << '\n';
  for (dsaug::RawSeverity sev : dsaug::kAllSeverities)
    std::cout << dsaug::severity_name(sev) << ": " << counts[sev] << '\n';
  return 0;
}

int cmd_pause_stats(const std::string& manifest) {
  const auto records = dsaug::parse_manifest(manifest);
  const auto stats = dsaug::pause_statistics(records);
  std::cout << "group       sentences  mean_pauses  mean_slots  vs_normal\n";
  for (dsaug::RawSeverity sev : dsaug::kAllSeverities) {
    auto it = stats.per_group.find(sev);
    if (it == stats.per_group.end() || it->second.sentence_count == 0) continue;
    const auto& g = it->second;
    std::ostringstream row;
    row << dsaug::severity_name(sev);
    row << std::string(12 - std::min<std::size_t>(12, row.str().size()), ' ');
    std::cout << row.str() << g.sentence_count << "  " << g.mean_pauses_per_sentence
              << "  " << g.mean_slots_per_sentence;
    if (sev != dsaug::RawSeverity::kNormal) {
      auto normal = stats.per_group.find(dsaug::RawSeverity::kNormal);
      if (normal == stats.per_group.end() ||
          normal->second.mean_pauses_per_sentence == 0.0) {
        std::cout << "  n/a";
      } else {
        const long pct =
            dsaug::display_percent(dsaug::pause_ratio_vs_normal(stats, sev));
        std::cout << "  " << (pct >= 0 ? "+" : "") << pct << "%";
      }
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_calibrate(const std::string& manifest, const std::string& out) {
  const auto records = dsaug::parse_manifest(manifest);
  const auto model = dsaug::calibrate(dsaug::pause_statistics(records));
  dsaug::save_pause_model(model, out);
  std::cerr << "pause model written to " << out << '\n';
  return 0;
}

int cmd_plan(const std::string& manifest, const std::string& experiment,
             std::uint64_t seed, const std::string& out,
             const std::string& speakers_filter) {
  auto records = dsaug::parse_manifest(manifest);
  if (!speakers_filter.empty()) {
    std::set<std::string> keep;
    std::istringstream in(speakers_filter);
    std::string id;
    while (std::getline(in, id, ',')) keep.insert(id);
    std::erase_if(records, [&keep](const dsaug::UtteranceRecord& r) {
      return !keep.count(r.speaker_id);
    });
    if (records.empty())
      throw dsaug::DataError("--speakers filter removed every record");
  }
  const auto grid = dsaug::builtin_grid(dsaug::parse_experiment(experiment));
  const auto specs = dsaug::plan(records, grid, seed);
  dsaug::write_plan(specs, out);
  std::cerr << "plan with " << specs.size() << " specs written to " << out << '\n';
  return 0;
}

int cmd_train(const std::string& manifest, const std::string& config_path,
              const std::string& lexicon_path, const std::string& out) {
  const auto records = dsaug::parse_manifest(manifest);
  const auto lexicon = dsaug::Lexicon::load(lexicon_path);
  TrainRunConfig run = load_train_config(config_path);

  std::set<std::string> speaker_set;
  for (const auto& r : records) speaker_set.insert(r.speaker_id);
  std::vector<std::string> speakers(speaker_set.begin(), speaker_set.end());

  auto params = dsaug::ModelParams::init(run.model, speakers,
                                         lexicon.inventory(), run.options.seed);
  std::vector<dsaug::TrainingExample> examples;
  for (const auto& r : records)
    examples.push_back(dsaug::toy::example_from_record(
        lexicon, params.config, r, params.speaker_index(r.speaker_id)));

  const auto curve = dsaug::train(params, examples, run.options);
  dsaug::save_checkpoint(params, out);
  std::ofstream csv(out + ".loss.csv");
  csv << "step,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i)
    csv << i << ',' << curve[i] << '\n';
  std::cerr << "checkpoint written to " << out << " (final loss "
            << (curve.empty() ? 0.0 : curve.back()) << ")\n";
  return 0;
}

int cmd_synth(const std::string& plan_path, const std::string& ckpt,
              const std::string& pause_model_path,
              const std::string& lexicon_path, const std::string& out_dir) {
  const auto specs = dsaug::read_plan(plan_path);
  const auto params = dsaug::load_checkpoint(ckpt);
  const auto pause_model = dsaug::load_pause_model(pause_model_path);
  const auto lexicon = dsaug::Lexicon::load(lexicon_path);
  if (lexicon.inventory() != params.phones)
    throw dsaug::DataError("lexicon phone inventory does not match checkpoint");
  fs::create_directories(out_dir);
  std::ofstream diag_out(fs::path(out_dir) / "diagnostics.jsonl");

  for (const auto& spec_rec : specs) {
    const auto phrase = dsaug::phonemize(spec_rec.transcript, lexicon);
    const int speaker = params.speaker_index(spec_rec.speaker_id);
    dsaug::Rng rng(spec_rec.seed);
    dsaug::SynthesisDiagnostics diag;
    const auto mel = dsaug::synthesize(params, phrase, speaker,
                                       spec_rec.controls, pause_model, lexicon,
                                       rng, &diag);
    const std::string name = spec_rec.utterance_id + "." +
                             std::to_string(spec_rec.variant_index) + ".mel";
    dsaug::write_melb(mel, (fs::path(out_dir) / name).string());
    json j{{"utterance_id", spec_rec.utterance_id},
           {"variant_index", spec_rec.variant_index},
           {"n_frames", mel.data.rows()},
           {"inserted_slots", std::vector<int>(diag.inserted_slots.begin(),
                                               diag.inserted_slots.end())},
           {"n_phones", diag.durations.size()}};
    diag_out << j.dump() << '\n';
  }
  std::cerr << specs.size() << " mel files written to " << out_dir << '\n';
  return 0;
}

std::map<std::string, std::vector<std::string>> read_text_table(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dsaug::DataError("cannot open file: " + path);
  std::map<std::string, std::vector<std::string>> table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw dsaug::DataError(path + ":" + std::to_string(line_no) +
                             ": expected `id<TAB>text`");
    const std::string id = line.substr(0, tab);
    std::istringstream words(line.substr(tab + 1));
    std::vector<std::string> tokens;
    std::string w;
    while (words >> w) tokens.push_back(w);
    if (!table.emplace(id, std::move(tokens)).second)
      throw dsaug::DataError(path + ":" + std::to_string(line_no) +
                             ": duplicate id '" + id + "'");
  }
  return table;
}

int cmd_wer(const std::string& ref_path, const std::string& hyp_path,
            const std::string& groups_path, const std::string& out_path) {
  const auto refs = read_text_table(ref_path);
  const auto hyps = read_text_table(hyp_path);
  std::map<std::string, double> per_id;
  long total_errors = 0, total_words = 0;
  json utterances = json::array();
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    if (it == hyps.end())
      throw dsaug::DataError("hypothesis missing for id '" + id + "'");
    const auto breakdown = dsaug::wer(ref, it->second);
    per_id[id] = 100.0 * breakdown.wer;
    total_errors +=
        breakdown.substitutions + breakdown.deletions + breakdown.insertions;
    total_words += breakdown.ref_words;
    std::cout << id << "\tWER " << 100.0 * breakdown.wer << "%\tS "
              << breakdown.substitutions << " D " << breakdown.deletions
              << " I " << breakdown.insertions << " N " << breakdown.ref_words
              << '\n';
    utterances.push_back(json{{"id", id},
                              {"wer", breakdown.wer},
                              {"substitutions", breakdown.substitutions},
                              {"deletions", breakdown.deletions},
                              {"insertions", breakdown.insertions},
                              {"ref_words", breakdown.ref_words}});
  }
  const double overall_wer =
      total_words > 0 ? 100.0 * double(total_errors) / double(total_words) : 0.0;
  std::cout << "overall\tWER " << overall_wer << "% (" << total_errors << "/"
            << total_words << ")\n";
  json report{{"utterances", utterances}, {"overall_wer", overall_wer}};

  if (!groups_path.empty()) {
    std::map<std::string, std::string> groups;
    for (const auto& [id, tokens] : read_text_table(groups_path)) {
      if (tokens.size() != 1)
        throw dsaug::DataError("groups file: expected `id<TAB>group`");
      groups[id] = tokens[0];
    }
    const auto grouped = dsaug::group_average(per_id, groups);
    std::cout << "group\tmean_wer\n";
    for (const auto& [group, mean] : grouped.per_group)
      std::cout << group << '\t' << dsaug::display_round1(mean) << '\n';
    std::cout << "all\t" << dsaug::display_round1(grouped.overall) << '\n';
    json g;
    for (const auto& [group, mean] : grouped.per_group) g[group] = mean;
    report["group_means"] = g;
    report["macro_average"] = grouped.overall;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << report.dump(2) << '\n';
  }
  return 0;
}

int cmd_splits(const std::string& manifest) {
  const auto records = dsaug::parse_manifest(manifest);
  for (const auto& split : dsaug::loso_splits(records)) {
    std::cout << "test " << split.test_speaker << " | train";
    for (const auto& s : split.train_speakers) std::cout << ' ' << s;
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dysarthric-speech augmentation toolkit"};
  app.require_subcommand(1);

  std::string manifest, out, experiment, config_path, lexicon_path;
  std::string plan_path, ckpt, pause_model_path, out_dir;
  std::string ref_path, hyp_path, groups_path, speakers_filter;
  std::uint64_t seed = 0;
  bool lenient = false;

  auto* ingest = app.add_subcommand("ingest", "Validate a manifest");
  ingest->add_option("--manifest", manifest, "Manifest path")->required();
  ingest->add_flag("--lenient", lenient, "Allow unknown manifest keys");

  auto* pauses = app.add_subcommand("pause-stats", "Per-group pause statistics");
  pauses->add_option("--manifest", manifest, "Manifest path")->required();

  auto* calib = app.add_subcommand("calibrate-pauses", "Fit the pause model");
  calib->add_option("--manifest", manifest, "Manifest path")->required();
  calib->add_option("--out", out, "Output pause model JSON")->required();

  auto* planc = app.add_subcommand("plan", "Build an augmentation plan");
  planc->add_option("--manifest", manifest, "Manifest path")->required();
  planc->add_option("--experiment", experiment, "exp1 or exp2")->required();
  planc->add_option("--seed", seed, "Plan seed")->required();
  planc->add_option("--out", out, "Output plan JSONL")->required();
  planc->add_option("--speakers", speakers_filter,
                    "Comma-separated speaker ids to include");

  auto* trainc = app.add_subcommand("train", "Train the toy acoustic model");
  trainc->add_option("--manifest", manifest, "Manifest path")->required();
  trainc->add_option("--config", config_path, "key = value training config");
  trainc->add_option("--lexicon", lexicon_path, "Lexicon path")->required();
  trainc->add_option("--out", out, "Output checkpoint path")->required();

  auto* synthc = app.add_subcommand("synth", "Synthesize mels from a plan");
  synthc->add_option("--plan", plan_path, "Plan JSONL")->required();
  synthc->add_option("--ckpt", ckpt, "Checkpoint path")->required();
  synthc->add_option("--pause-model", pause_model_path, "Pause model JSON")
      ->required();
  synthc->add_option("--lexicon", lexicon_path, "Lexicon path")->required();
  synthc->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* werc = app.add_subcommand("wer", "Score hypotheses against references");
  werc->add_option("--ref", ref_path, "Reference `id<TAB>text` file")->required();
  werc->add_option("--hyp", hyp_path, "Hypothesis `id<TAB>text` file")->required();
  werc->add_option("--groups", groups_path, "Optional `id<TAB>group` file");
  werc->add_option("--out", out, "Write JSON report here");

  auto* splitsc = app.add_subcommand("splits", "Leave-one-speaker-out splits");
  splitsc->add_option("--manifest", manifest, "Manifest path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (*ingest) return cmd_ingest(manifest, lenient);
    if (*pauses) return cmd_pause_stats(manifest);
    if (*calib) return cmd_calibrate(manifest, out);
    if (*planc) return cmd_plan(manifest, experiment, seed, out, speakers_filter);
    if (*trainc) return cmd_train(manifest, config_path, lexicon_path, out);
    if (*synthc)
      return cmd_synth(plan_path, ckpt, pause_model_path, lexicon_path, out_dir);
    if (*werc) return cmd_wer(ref_path, hyp_path, groups_path, out);
    if (*splitsc) return cmd_splits(manifest);
  } catch (const dsaug::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
