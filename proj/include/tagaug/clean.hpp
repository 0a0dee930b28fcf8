#pragma once

#include "tagaug/linearize.hpp"

#include <map>

namespace tagaug {

struct CleanReport {
    size_t kept = 0;
    // buckets: "malformed", "rule1" .. "rule4"
    std::map<std::string, size_t> rejected;
    // up to five raw sequences per bucket, space-joined, for eyeballing
    std::map<std::string, std::vector<std::string>> samples;

    size_t total_rejected() const;
    size_t input_count() const { return kept + total_rejected(); }
};

// Rejection pass over generated sequences, in fixed order:
//   malformed: delinearization fails structurally
//   rule 1: no entity tag anywhere (skipped for TOKEN corpora)
//   rule 2: every word is [unk]
//   rule 3: tag sequence invalid under the scheme
//   rule 4: identical word sequence with conflicting tags (whole group
//           goes); exact duplicates collapse to a single copy, the extras
//           counted under rule 4
// When `gold` is given its sentences join the rule-4 grouping: a survivor
// whose words match a gold sentence but whose tags differ is dropped, and
// one that matches gold exactly is treated as a duplicate of it.
std::pair<std::vector<TaggedSentence>, CleanReport>
clean(const std::vector<LinearizedSequence>& sequences, const LinearizeConfig& cfg,
      TagScheme scheme, const std::set<std::string>& tagset, const Corpus* gold = nullptr);

// Human-readable report: counts plus "#"-prefixed sample lines.
void write_clean_report(std::ostream& out, const CleanReport& r);

} // namespace tagaug
