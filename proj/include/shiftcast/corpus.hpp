#pragma once

// Corpus-on-disk layout: one directory per participant (manifest + stream
// files) plus corpus.json (participant index + generator config echo) and
// truth.json (generator bookkeeping).

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "shiftcast/recording.hpp"
#include "shiftcast/synth.hpp"

namespace shiftcast {

inline std::filesystem::path write_corpus(const SynthCorpus& corpus, const SynthConfig& cfg,
                                          const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  json participants = json::array();
  for (const auto& rec : corpus.recordings) {
    save_recording(rec, dir / rec.participant_id);
    participants.push_back(rec.participant_id + "/manifest.json");
  }
  json index{{"format", "shiftcast-corpus/1"},
             {"config", synth_config_to_json(cfg)},
             {"participants", participants}};
  const auto index_path = dir / "corpus.json";
  {
    std::ofstream out(index_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + index_path.string());
    out << index.dump(2) << '\n';
  }
  {
    json truth = truth_to_json(corpus.truth);
    truth["config"] = synth_config_to_json(cfg);
    std::ofstream out(dir / "truth.json", std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + (dir / "truth.json").string());
    out << truth.dump(2) << '\n';
  }
  return index_path;
}

/// Loads every recording listed by a corpus.json, or scans a directory for
/// participant subdirectories holding manifest.json files.
inline std::vector<Recording> load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path index = path;
  if (fs::is_directory(index)) {
    if (fs::exists(index / "corpus.json")) {
      index /= "corpus.json";
    } else {
      std::vector<fs::path> manifests;
      for (const auto& entry : fs::directory_iterator(index)) {
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
          manifests.push_back(entry.path() / "manifest.json");
      }
      std::sort(manifests.begin(), manifests.end());
      if (manifests.empty())
        throw MissingStreamError("no corpus.json or participant manifests under " +
                                 index.string());
      std::vector<Recording> recordings;
      recordings.reserve(manifests.size());
      for (const auto& m : manifests) recordings.push_back(load_recording(m));
      return recordings;
    }
  }
  std::ifstream in(index);
  if (!in) throw MissingStreamError("missing corpus index: " + index.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("corpus index: " + std::string(e.what()));
  }
  std::vector<Recording> recordings;
  for (const auto& rel : j.at("participants"))
    recordings.push_back(load_recording(index.parent_path() / rel.get<std::string>()));
  return recordings;
}

}  // namespace shiftcast
