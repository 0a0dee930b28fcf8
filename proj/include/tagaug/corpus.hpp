#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tagaug {

// Thrown for unreadable or structurally broken input files.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a tag sequence is not valid under its tagging scheme.
struct SchemeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown for violated function preconditions (bad sizes, empty inputs, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a binary artifact (model checkpoint, KB file) is corrupt.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TagScheme { BIO, IOBES, TOKEN };

std::string scheme_name(TagScheme s);
TagScheme scheme_from_name(const std::string& name);

struct Token {
    std::string surface;
    std::string tag;
    bool operator==(const Token&) const = default;
};

struct TaggedSentence {
    std::vector<Token> tokens;

    bool operator==(const TaggedSentence&) const = default;
    std::vector<std::string> words() const;
    std::vector<std::string> tags() const;
};

// Half-open token range [start, end) carrying an entity type.
struct Span {
    std::string type;
    size_t start = 0;
    size_t end = 0;
    bool operator==(const Span&) const = default;
    auto operator<=>(const Span&) const = default;
};

struct Corpus {
    std::vector<TaggedSentence> sentences;
    TagScheme scheme = TagScheme::IOBES;
    std::set<std::string> tagset; // every tag label that occurs, minus "O"
};

// Control tokens owned by the toolkit. Surfaces in input data that collide
// with one of these are escaped with a leading backslash on read and
// unescaped on write, so they can never be mistaken for control tokens.
extern const std::vector<std::string> kReservedTokens;   // all seven
extern const std::vector<std::string> kConditionTokens;  // [labeled] [unlabeled] [KB]

bool is_reserved_token(const std::string& s);
bool is_condition_token(const std::string& s);
std::string escape_surface(const std::string& s);
std::string unescape_surface(const std::string& s);

// --- tag scheme helpers ---------------------------------------------------

// True when `tags` forms a legal sequence under `scheme`. TOKEN sequences
// are always legal (any label goes).
bool tags_valid(const std::vector<std::string>& tags, TagScheme scheme);

// Entity spans of a sentence. TOKEN scheme has no spans and yields {}.
// Throws SchemeError when the tag sequence is not valid under `scheme`.
std::vector<Span> extract_spans(const TaggedSentence& s, TagScheme scheme);

// Writes IOBES tags for `spans` over a sentence of `len` tokens ("O" elsewhere).
std::vector<std::string> spans_to_iobes(const std::vector<Span>& spans, size_t len);

// BIO -> IOBES. Corpora already in IOBES pass through unchanged.
Corpus convert_to_iobes(const Corpus& c);

// --- file formats -----------------------------------------------------------

// Two-column format: "surface<TAB>tag", blank line between sentences.
// Column split accepts tabs or runs of spaces. When `scheme` is not given
// it is inferred from the tags (E-/S- present -> IOBES, B-/I- -> BIO,
// bare labels -> TOKEN).
Corpus read_conll(std::istream& in, std::optional<TagScheme> scheme = std::nullopt);
void write_conll(std::ostream& out, const Corpus& c);

// One pre-tokenized sentence per line. Reserved surfaces get escaped,
// same as read_conll.
std::vector<std::vector<std::string>> read_unlabeled_text(std::istream& in);

// --- vocabulary -------------------------------------------------------------

using LinearizedSequence = std::vector<std::string>;

class Vocabulary {
public:
    static constexpr int pad_id = 0;
    static constexpr int unk_id = 1;
    static constexpr int bos_id = 2;
    static constexpr int eos_id = 3;

    // Frequency-thresholded vocabulary over linearized token streams.
    // `always_keep` (tag tokens, condition tags) survive any threshold and
    // are appended even when absent from the data. When `count_always_keep`
    // is false those tokens are left out of the frequency counts (words
    // are thresholded the same way either way).
    static Vocabulary build(const std::vector<LinearizedSequence>& sequences,
                            const std::set<std::string>& always_keep,
                            int min_count = 2,
                            bool count_always_keep = true);

    // Rebuild from an explicit id->token table (checkpoint loading).
    static Vocabulary from_tokens(const std::vector<std::string>& tokens);

    int size() const { return int(id_to_token_.size()); }
    int encode(const std::string& token) const;          // unknown -> unk_id
    const std::string& decode(int id) const;             // throws DomainError when out of range
    bool contains(const std::string& token) const;
    const std::vector<std::string>& tokens() const { return id_to_token_; }
    const std::vector<int>& condition_ids() const { return condition_ids_; }

private:
    std::vector<std::string> id_to_token_;
    std::map<std::string, int> token_to_id_;
    std::vector<int> condition_ids_;
};

// Mean body length, rounded half away from zero, never below 1. A leading
// condition token is not part of the body and does not count.
// Used as the generation length cap.
int average_linearized_length(const std::vector<LinearizedSequence>& sequences);

} // namespace tagaug
