#pragma once

#include "tagaug/rnnlm.hpp"

#include <functional>
#include <optional>
#include <set>

namespace tagaug {

struct GenConfig {
    int max_len = 0;                     // generated tokens per sequence, > 0
    double temperature = 1.0;            // < 1e-6 switches to argmax
    int batch_size = 1000;
    double saturation_threshold = 0.99;  // stop when ratio exceeds this (strict)
    int max_batches = 100;
    std::optional<std::string> condition;
    uint64_t seed = 1;
    // true: a token occurrence counts toward the ratio when its type was
    // seen before; false (default): the ratio is over distinct types.
    bool occurrence_weighted = false;
    // workers for filling a batch; sequence i always lands in slot i, so
    // output is identical at any thread count
    int threads = 1;
};

// Samples one sequence: prime with [BOS] (plus the condition token, which
// is recorded up front, never sampled), then draw from the temperature-
// scaled softmax until [EOS] or max_len tokens. [BOS], [pad], and every
// condition token are masked out of the distribution. The condition, when
// present, sits at position 0 of the result; [BOS]/[EOS] are not included.
LinearizedSequence sample_sequence(const LMCheckpoint& ckpt, const GenConfig& cfg, Rng& rng);

struct GenReport {
    int batches = 0;
    size_t sequences = 0;
    std::vector<double> ratios;      // one per batch; first batch compares to nothing
    bool saturated = false;          // false when max_batches stopped the loop
    size_t distinct_types = 0;       // across everything generated
};

// Fraction of distinct token types in `batch` already present in `seen`.
// A batch of empty sequences has an empty type set and counts as fully
// saturated; a batch with no sequences at all is a DomainError.
double saturation_ratio(const std::vector<LinearizedSequence>& batch,
                        const std::set<std::string>& seen);

// Batched sampling loop: after each batch of cfg.batch_size sequences,
// compare the batch's token types against the union of all previous
// batches; stop once the overlap ratio exceeds cfg.saturation_threshold.
// The triggering batch is kept. Sequence i draws from its own generator
// seeded with cfg.seed ^ i, so the output is independent of batch size.
std::pair<std::vector<LinearizedSequence>, GenReport>
generate_until_saturated(const LMCheckpoint& ckpt, const GenConfig& cfg);

// Same loop with sampling delegated to `sampler` (index -> sequence);
// exists so saturation behavior can be exercised without a trained model.
// With cfg.threads > 1 the sampler must be safe to call concurrently.
std::pair<std::vector<LinearizedSequence>, GenReport>
generate_with_sampler(const std::function<LinearizedSequence(size_t)>& sampler,
                      const GenConfig& cfg);

} // namespace tagaug
