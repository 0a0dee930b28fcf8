#pragma once

#include "tagaug/corpus.hpp"
#include "tagaug/rng.hpp"

namespace tagaug {

// Uniform sample of n sentences without replacement, in shuffled order.
Corpus subsample(const Corpus& corpus, size_t n, uint64_t seed);

// Independent per-word deletion with probability p. When entity_aware is
// set, hitting any word inside a span removes the whole span. Without it,
// span remnants are re-encoded so the output stays scheme-valid (an
// interior deletion splits a span in two). Sentences that lose every
// token are dropped.
Corpus random_deletion(const Corpus& corpus, double p, bool entity_aware, uint64_t seed);

// Repeated independent deletion passes over gold, concatenated and cut to
// exactly `target` sentences. Used to volume-match deletion data against
// a generated synthetic set.
Corpus deletion_passes(const Corpus& gold, double p, bool entity_aware, uint64_t seed,
                       size_t target);

enum class Recipe {
    Gold,     // gold only
    Gen,      // oversampled gold + generated synthetic
    Rd,       // oversampled gold + deletion synthetic
    RdStar,   // 1:1 gold + deletion synthetic (|synthetic| tiled/cut to |gold|)
    Wt,       // oversampled gold + weakly tagged synthetic
    Kb,       // oversampled gold + KB-annotated synthetic
    GenUd,    // oversampled gold + capped synthetic from an unlabeled-mix LM
    GenKb     // oversampled gold + capped synthetic from a KB-mix LM
};

std::string recipe_name(Recipe r);
Recipe recipe_from_name(const std::string& name);

struct AssemblePlan {
    Recipe recipe = Recipe::Gold;
    int gold_oversample = 4;
    size_t synthetic_cap = 20000; // applies to GenUd / GenKb only
    uint64_t seed = 1;
};

// Final training set arithmetic. Gold passes through untouched for the
// Gold recipe; everything else concatenates `gold_oversample` gold copies
// (one copy for RdStar) with the synthetic block and shuffles.
Corpus assemble_training_set(const Corpus& gold, const Corpus& synthetic,
                             const AssemblePlan& plan);

// Tags every sequence with its origin's condition token at position 0 and
// interleaves the two sources for LM training. With `equalize`, the
// smaller side is tiled (fresh shuffle per repetition, remainder cut) up
// to the larger side's count. The combined result is shuffled.
std::vector<LinearizedSequence> mix_for_lm(const std::vector<LinearizedSequence>& gold,
                                           const std::vector<LinearizedSequence>& aux,
                                           const std::string& gold_condition,
                                           const std::string& aux_condition,
                                           bool equalize, uint64_t seed);

} // namespace tagaug
