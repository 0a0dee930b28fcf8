#pragma once

#include "tagaug/corpus.hpp"
#include "tagaug/rng.hpp"

#include <map>

namespace tagaug {

// Template grammar for synthesizing small IOBES corpora in tests and
// experiments. Template tokens starting with '$' name an entity type to
// fill from that type's lexicon; everything else is a context word
// tagged "O".
struct ToyGrammar {
    std::map<std::string, std::vector<std::vector<std::string>>> lexicons;
    std::vector<std::vector<std::string>> templates;
};

// Built-in grammar: five entity types (PER, LOC, ORG, DATE, EVT), around
// two hundred distinct words, a few surfaces deliberately shared between
// LOC and ORG so type decisions need context.
ToyGrammar demo_grammar();

// n sentences, templates and lexicon entries drawn uniformly. Output is
// valid IOBES by construction.
Corpus gen_toy_corpus(const ToyGrammar& g, size_t n, uint64_t seed);

struct ToySplits {
    Corpus train, dev, test;
};

// Three corpora with pairwise-distinct word sequences (drawn from one
// stream, so any (sizes, seed) combination is reproducible).
ToySplits gen_toy_splits(const ToyGrammar& g, size_t n_train, size_t n_dev, size_t n_test,
                         uint64_t seed);

} // namespace tagaug
