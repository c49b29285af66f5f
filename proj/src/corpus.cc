// Copyright 2026 The OriginRank Authors.
//
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

#include "originrank/corpus.h"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

using ordered_json = nlohmann::ordered_json;

std::string_view label_name(Label label) {
  return label == Label::kRecorded ? "recorded" : "synthetic";
}

Label parse_label(std::string_view text) {
  if (text == "recorded") return Label::kRecorded;
  if (text == "synthetic") return Label::kSynthetic;
  throw Error(Errc::kParseError, "unknown label '" + std::string(text) + "'");
}

std::size_t CorpusIndex::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(),
                    [label](const UtteranceRecord& r) { return r.label == label; }));
}

std::size_t CorpusIndex::find(std::string_view id) const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id == id) return i;
  }
  return npos;
}

namespace {

UtteranceRecord parse_record(const ordered_json& j) {
  if (!j.is_object()) throw Error(Errc::kParseError, "record is not an object");
  UtteranceRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.label = parse_label(j.at("label").get<std::string>());
    r.path = j.at("path").get<std::string>();
    r.sample_rate = j.at("sample_rate").get<int>();
    if (j.contains("degradation") && !j["degradation"].is_null()) {
      r.degradation = j["degradation"].get<double>();
    }
    if (j.contains("base_id")) r.base_id = j["base_id"].get<std::string>();
    if (j.contains("base_path")) r.base_path = j["base_path"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, e.what());
  }
  return r;
}

void validate_record(const UtteranceRecord& r,
                     std::unordered_set<std::string>& seen) {
  if (r.id.empty()) throw Error(Errc::kParseError, "empty id");
  if (r.id.find_first_of(",\"\n\r") != std::string::npos) {
    throw Error(Errc::kParseError, "id '" + r.id + "' contains a reserved character");
  }
  if (!seen.insert(r.id).second) {
    throw Error(Errc::kDuplicateId, "duplicate id '" + r.id + "'");
  }
  if (r.sample_rate <= 0) {
    throw Error(Errc::kParseError, "non-positive sample_rate for '" + r.id + "'");
  }
  if (r.path.empty()) throw Error(Errc::kParseError, "empty path for '" + r.id + "'");
  if (r.degradation) {
    if (r.label == Label::kRecorded) {
      throw Error(Errc::kLabelMismatch,
                  "degradation given for recorded utterance '" + r.id + "'");
    }
    if (!(*r.degradation >= 0.0 && *r.degradation <= 1.0)) {
      throw Error(Errc::kOutOfRange, "degradation outside [0,1] for '" + r.id + "'");
    }
  }
}

}  // namespace

void validate_records(const std::vector<UtteranceRecord>& records) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records) validate_record(r, seen);
}

CorpusIndex scan_corpus(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(Errc::kNotFound, "cannot open manifest " + manifest_path.string());

  CorpusIndex index;
  index.root = manifest_path.has_parent_path() ? manifest_path.parent_path()
                                               : std::filesystem::path(".");
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      UtteranceRecord r = parse_record(ordered_json::parse(line));
      validate_record(r, seen);
      index.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kParseError, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
    }
  }

  for (const auto& r : index.records) {
    if (!std::filesystem::exists(index.resolve(r.path))) {
      throw Error(Errc::kMissingFile, "missing audio " + index.resolve(r.path).string());
    }
    if (r.base_path && !std::filesystem::exists(index.resolve(*r.base_path))) {
      throw Error(Errc::kMissingFile, "missing base audio " + *r.base_path);
    }
  }
  return index;
}

std::string manifest_line(const UtteranceRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["label"] = std::string(label_name(r.label));
  j["path"] = r.path;
  j["sample_rate"] = r.sample_rate;
  if (r.degradation) j["degradation"] = *r.degradation;
  if (r.base_id) j["base_id"] = *r.base_id;
  if (r.base_path) j["base_path"] = *r.base_path;
  return j.dump();
}

void write_manifest(const CorpusIndex& index,
                    const std::filesystem::path& manifest_path) {
  std::string text;
  for (const auto& r : index.records) {
    text += manifest_line(r);
    text.push_back('\n');
  }
  write_text_file(manifest_path, text);
}

}  // namespace originrank
