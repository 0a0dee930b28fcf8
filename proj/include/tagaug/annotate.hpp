#pragma once

#include "tagaug/corpus.hpp"
#include "tagaug/tagger.hpp"

#include <iosfwd>
#include <map>

namespace tagaug {

// Surface-form gazetteer: multi-token entity surfaces mapped to one type
// each. Matching is case-sensitive and exact.
class KnowledgeBase {
public:
    void add(const std::vector<std::string>& surface, const std::string& type);
    size_t size() const { return entries_.size(); }
    size_t max_surface_len() const { return max_len_; }
    // nullptr when the exact surface is absent
    const std::string* lookup(const std::vector<std::string>& surface) const;
    const std::map<std::vector<std::string>, std::string>& entries() const { return entries_; }

private:
    std::map<std::vector<std::string>, std::string> entries_;
    size_t max_len_ = 0;
};

// Collects entity surfaces from gold spans. A surface becomes an entry
// when it occurs at least `min_freq` times (case-sensitive, summed across
// types); surfaces seen with several types keep the most frequent one,
// ties going to the lexicographically smaller type name.
KnowledgeBase build_kb(const Corpus& corpus, int min_freq = 2);

// Greedy leftmost-longest matching: scan left to right, at each position
// take the longest KB surface starting there, tag it as one IOBES span,
// and continue after it. Unmatched words get "O".
TaggedSentence kb_annotate(const std::vector<std::string>& words, const KnowledgeBase& kb);

Corpus kb_annotate_corpus(const std::vector<std::vector<std::string>>& sentences,
                          const KnowledgeBase& kb);

// Runs the trained tagger over raw sentences (scheme-constrained decoding,
// so outputs are always well-formed).
Corpus weak_tag(const std::vector<std::vector<std::string>>& sentences, const TaggerModel& tagger);

// One entry per line: "surface tokens<TAB>TYPE". Duplicate surfaces in a
// file are resolved like build_kb resolves conflicts (line count = frequency).
void write_kb_tsv(std::ostream& out, const KnowledgeBase& kb);
KnowledgeBase read_kb_tsv(std::istream& in);

} // namespace tagaug
