#pragma once

#include "tagaug/corpus.hpp"

#include <iosfwd>

namespace tagaug {

// One entity occurrence with one word of context on each side: the word
// before (or "<S>" at the sentence start), the entity surface, the word
// after (or "</S>" at the end), space-joined.
std::set<std::string> contextualized_entities(const Corpus& c);

// Distinct (surface, type) pairs, "surface\ttype". With type_sensitive
// off, just the distinct surfaces.
std::set<std::string> entity_set(const Corpus& c, bool type_sensitive = true);

// Distinct word surface forms.
std::set<std::string> unigram_set(const Corpus& c);

struct DiversityReport {
    size_t gold_unique_ce = 0;
    size_t generated_new_ce = 0;     // CEs in generated, absent from gold
    double ce_ratio = 0;             // generated_new_ce / gold_unique_ce
    size_t gold_unique_entities = 0;
    size_t generated_new_entities = 0;
    size_t new_unigram_types = 0;    // generated word types unseen in gold
};

DiversityReport diversity_report(const Corpus& gold, const Corpus& generated,
                                 bool type_sensitive = true);

void write_diversity_report(std::ostream& out, const DiversityReport& r);
std::string diversity_report_tsv(const DiversityReport& r);

} // namespace tagaug
