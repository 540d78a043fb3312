#pragma once

// Syntactic choice of variable packs for the relational domains.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "miniastree/ellipsoid.hpp"
#include "miniastree/frontend.hpp"

namespace miniastree {

enum class PackKind { Octagon, Tree, Filter };
const char* pack_kind_name(PackKind k);

struct Pack {
  PackKind kind = PackKind::Octagon;
  std::string id;
  // Octagon: numeric variables. Filter: {X, X', Y}. Tree: bools then nums.
  std::vector<int> vars;
  std::vector<int> bools;  // tree only, in order
  std::vector<int> nums;   // tree only
  bool confirmed = false;

  // Filter only.
  FilterParams params;
  int update_stmt = -1;  // point id of X' := aX - bY + t
  std::vector<std::pair<int, ExprPtr>> t_terms;  // signed input terms
  bool b_written_negated = true;  // `- b*Y` rather than `+ c*Y` with c < 0
};

struct PackingResult {
  std::vector<Pack> octagons;
  std::vector<Pack> trees;
  std::vector<Pack> filters;
  std::vector<std::string> warnings;

  double mean_octagon_size() const;
};

struct PackingOptions {
  int tree_bool_cap = 3;
};

// Stable id: FNV-1a of the kind and the sorted qualified names.
std::string pack_id(PackKind kind, const Program& p, const std::vector<int>& vars);

std::vector<Pack> infer_octagon_packs(const Program& p);
std::vector<Pack> infer_tree_packs(const Program& p, int cap);
std::vector<Pack> detect_filter_patterns(const Program& p, std::vector<std::string>* warnings = nullptr);
PackingResult infer_packs(const Program& p, const PackingOptions& opt = {});

// Keeps only the listed octagon packs; unknown ids are reported in `notes`.
PackingResult filter_useful_packs(PackingResult r, const std::set<std::string>& useful,
                                  std::vector<std::string>* notes = nullptr);
std::set<std::string> read_pack_ids(const std::string& path);
void write_pack_ids(const std::string& path, const std::set<std::string>& ids);

// Additive decomposition of e into signed terms, used by filter matching.
std::vector<std::pair<int, ExprPtr>> additive_terms(const ExprPtr& e);

}  // namespace miniastree
