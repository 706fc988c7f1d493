#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posmon/classifier.hpp"

namespace posmon {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;

  nlohmann::json to_json() const;
};

struct GalleryEntry {
  std::string id;
  std::string instance;
  std::string citation;
  std::vector<std::pair<Property, VerdictStatus>> expected;
  std::string recipe;  // one line on what the checks certify
  std::function<std::vector<Check>(const MonoidDescriptor&)> run_checks;
};

/// Deterministic order.
const std::vector<GalleryEntry>& gallery_list();
const GalleryEntry& gallery_entry(std::string_view id);

struct EntryResult {
  std::string id;
  bool expected_ok = false;  // every expected fragment reproduced
  bool chain_ok = false;
  std::vector<Check> checks;
  PropertyReport report;
  std::string error;  // exception text, if the recipe threw

  bool passed() const;
  nlohmann::json to_json() const;
};

EntryResult run_entry(const GalleryEntry& e);
/// Runs every entry, `jobs` at a time; results keep gallery order.
std::vector<EntryResult> run_gallery(unsigned jobs = 1);

}  // namespace posmon
