#pragma once

#include "tagaug/corpus.hpp"
#include "tagaug/rng.hpp"

#include <iosfwd>
#include <unordered_map>

namespace tagaug {

// Lazily-averaged weight vector for the structured perceptron: `current`
// drives training-time decoding, finalize() yields the running average of
// the value across all update steps seen so far.
struct AveragedWeights {
    std::vector<double> current;
    std::vector<double> total;
    std::vector<uint64_t> stamp;

    explicit AveragedWeights(size_t n)
        : current(n, 0.0), total(n, 0.0), stamp(n, 0) {}

    // Applies `delta` during step `now` (1-based). The running sum counts
    // the value a weight holds at the end of each step.
    void add(size_t i, double delta, uint64_t now) {
        total[i] += current[i] * double(now - 1 - stamp[i]);
        stamp[i] = now - 1;
        current[i] += delta;
    }

    // Mean of the post-step values over steps 1..now.
    std::vector<double> finalize(uint64_t now) const {
        std::vector<double> avg(current.size(), 0.0);
        if (now == 0) return avg;
        for (size_t i = 0; i < current.size(); ++i)
            avg[i] = (total[i] + current[i] * double(now - stamp[i])) / double(now);
        return avg;
    }
};

// Averaged structured perceptron with hand-rolled lexical features and
// first-order tag transitions.
struct TaggerModel {
    TagScheme scheme = TagScheme::IOBES;
    std::vector<std::string> tags; // sorted; index is the tag id
    std::unordered_map<std::string, std::vector<double>> emission; // feature -> per-tag weights
    std::vector<double> transition; // tags.size()^2, [prev * T + cur]

    int tag_id(const std::string& tag) const;
    double trans(int prev, int cur) const { return transition[size_t(prev) * tags.size() + size_t(cur)]; }
};

// The seven per-token feature strings: word, lowercased word, 3-char
// prefix and suffix, character shape, previous and next word (with
// <s>/</s> at the edges).
std::vector<std::string> token_features(const std::vector<std::string>& words, size_t i);

// Character shape with runs collapsed: "McDonald-7" -> "XxXxod".
std::string word_shape(const std::string& w);

// Exact first-order Viterbi over emission + transition scores. Score ties
// break toward the lower tag id. When `constrain_scheme` is set,
// transitions that would breach the model's tagging scheme are barred
// (every scheme admits the all-"O" path, so decoding never dead-ends).
std::vector<std::string> viterbi_decode(const TaggerModel& m, const std::vector<std::string>& words,
                                        bool constrain_scheme);

// Unconstrained decode, the plain contract used by evaluation oracles.
std::vector<std::string> predict(const TaggerModel& m, const std::vector<std::string>& words);

// Averaged perceptron training; deterministic for a given seed.
TaggerModel train_tagger(const Corpus& corpus, int epochs = 10, uint64_t seed = 1);

// Tag every sentence with scheme-constrained decoding so downstream span
// extraction always succeeds.
Corpus tag_corpus(const TaggerModel& m, const std::vector<std::vector<std::string>>& sentences);

// Plain text model file.
void save_tagger(std::ostream& out, const TaggerModel& m);
TaggerModel load_tagger(std::istream& in);

// --- evaluation -------------------------------------------------------------

enum class EvalMode { Span, Token };

struct EvalReport {
    EvalMode mode = EvalMode::Span;
    double precision = 0, recall = 0, f1 = 0;
    double accuracy = 0;
    size_t gold_spans = 0, pred_spans = 0, matched_spans = 0;
    size_t tokens = 0, correct_tokens = 0;
};

// Micro-averaged exact-match span P/R/F1 (type and boundaries both) or
// token accuracy. Corpora must align in sentence count and lengths.
EvalReport evaluate(const Corpus& gold, const Corpus& pred, EvalMode mode);

void write_eval_report(std::ostream& out, const EvalReport& r);
std::string eval_report_tsv(const EvalReport& r);

} // namespace tagaug
