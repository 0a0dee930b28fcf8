#pragma once

#include "tagaug/corpus.hpp"

#include <iosfwd>
#include <optional>

namespace tagaug {

enum class LinearizeOrder { TagWord, WordTag };

std::string order_name(LinearizeOrder o);
LinearizeOrder order_from_name(const std::string& name);

struct LinearizeConfig {
    LinearizeOrder order = LinearizeOrder::TagWord;
    bool drop_o = true;                    // leave "O" tags out of the stream
    std::optional<std::string> condition;  // control token prepended at position 0
};

// Sentence -> flat token stream. Tag tokens sit before (TagWord) or after
// (WordTag) the word they annotate; "O" tags are omitted when drop_o is set.
// No [BOS]/[EOS] here; the LM data loader adds those.
LinearizedSequence linearize(const TaggedSentence& s, const LinearizeConfig& cfg);

std::vector<LinearizedSequence> linearize_corpus(const Corpus& c, const LinearizeConfig& cfg);

enum class DelinearizeStatus { Ok, Malformed };

struct DelinearizeResult {
    DelinearizeStatus status = DelinearizeStatus::Malformed;
    TaggedSentence sentence;          // set when status == Ok
    std::string condition;            // leading condition token, if one was present
    std::string error;                // set when status == Malformed
};

// Inverse of linearize. Tag tokens are recognized by exact membership in
// `tagset`; anything else is a word. Structural problems (two tags in a
// row under TagWord, trailing word without its tag under WordTag, ...)
// come back as Malformed rather than an exception so that bulk cleaning
// can bucket them cheaply.
DelinearizeResult try_delinearize(const LinearizedSequence& seq, const LinearizeConfig& cfg,
                                  const std::set<std::string>& tagset);

// Throwing wrapper for contexts where malformed input is a hard error.
TaggedSentence delinearize(const LinearizedSequence& seq, const LinearizeConfig& cfg,
                           const std::set<std::string>& tagset);

// One sequence per line, tokens separated by single spaces. A blank line
// is an empty sequence (samplers can emit those), so write/read round
// trips preserve sequence counts.
std::vector<LinearizedSequence> read_linearized(std::istream& in);
void write_linearized(std::ostream& out, const std::vector<LinearizedSequence>& seqs);

} // namespace tagaug
