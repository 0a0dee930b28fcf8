#include "tagaug/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace tagaug {

const std::vector<std::string> kReservedTokens = {
    "[BOS]", "[EOS]", "[unk]", "[pad]", "[labeled]", "[unlabeled]", "[KB]"};

const std::vector<std::string> kConditionTokens = {"[labeled]", "[unlabeled]", "[KB]"};

bool is_reserved_token(const std::string& s) {
    return std::find(kReservedTokens.begin(), kReservedTokens.end(), s) != kReservedTokens.end();
}

bool is_condition_token(const std::string& s) {
    return std::find(kConditionTokens.begin(), kConditionTokens.end(), s) != kConditionTokens.end();
}

namespace {

// "[BOS]", "\[BOS]", "\\[BOS]", ... all need one more backslash on read
// so that stripping one on write is always safe.
bool collides_with_reserved(const std::string& s) {
    size_t i = 0;
    while (i < s.size() && s[i] == '\\') ++i;
    return is_reserved_token(s.substr(i));
}

} // namespace

std::string escape_surface(const std::string& s) {
    if (collides_with_reserved(s)) return "\\" + s;
    return s;
}

std::string unescape_surface(const std::string& s) {
    if (!s.empty() && s[0] == '\\' && collides_with_reserved(s.substr(1))) return s.substr(1);
    return s;
}

std::string scheme_name(TagScheme s) {
    switch (s) {
        case TagScheme::BIO: return "bio";
        case TagScheme::IOBES: return "iobes";
        case TagScheme::TOKEN: return "token";
    }
    return "?";
}

TagScheme scheme_from_name(const std::string& name) {
    if (name == "bio") return TagScheme::BIO;
    if (name == "iobes") return TagScheme::IOBES;
    if (name == "token") return TagScheme::TOKEN;
    throw DomainError("unknown tag scheme: " + name);
}

std::vector<std::string> TaggedSentence::words() const {
    std::vector<std::string> w;
    w.reserve(tokens.size());
    for (const auto& t : tokens) w.push_back(t.surface);
    return w;
}

std::vector<std::string> TaggedSentence::tags() const {
    std::vector<std::string> w;
    w.reserve(tokens.size());
    for (const auto& t : tokens) w.push_back(t.tag);
    return w;
}

namespace {

// Splits "B-PER" into prefix 'B' and type "PER". Bare labels (TOKEN
// scheme or "O") report prefix 0.
bool split_tag(const std::string& tag, char* prefix, std::string* type) {
    if (tag.size() >= 2 && tag[1] == '-' &&
        (tag[0] == 'B' || tag[0] == 'I' || tag[0] == 'E' || tag[0] == 'S')) {
        *prefix = tag[0];
        *type = tag.substr(2);
        return true;
    }
    *prefix = 0;
    type->clear();
    return false;
}

// Shared scanner for validation and span extraction. Returns false with a
// message instead of throwing so tags_valid stays cheap.
bool scan_spans(const std::vector<std::string>& tags, TagScheme scheme,
                std::vector<Span>* out, std::string* err) {
    if (scheme == TagScheme::TOKEN) return true;
    bool iobes = scheme == TagScheme::IOBES;
    bool open = false;
    std::string open_type;
    size_t open_start = 0;
    auto close = [&](size_t end) {
        if (out) out->push_back({open_type, open_start, end});
        open = false;
    };
    for (size_t i = 0; i < tags.size(); ++i) {
        char prefix;
        std::string type;
        const std::string& tag = tags[i];
        if (!split_tag(tag, &prefix, &type)) {
            if (tag != "O") {
                // span schemes allow bare labels only as "O"
                if (err) *err = "bare tag '" + tag + "' at token " + std::to_string(i);
                return false;
            }
            // "O": any open IOBES span is unterminated, any open BIO span closes
            if (open) {
                if (iobes) {
                    if (err) *err = "span open at 'O' (token " + std::to_string(i) + ")";
                    return false;
                }
                close(i);
            }
            continue;
        }
        if (iobes) {
            switch (prefix) {
                case 'S':
                    if (open) {
                        if (err) *err = "S- inside open span at token " + std::to_string(i);
                        return false;
                    }
                    if (out) out->push_back({type, i, i + 1});
                    break;
                case 'B':
                    if (open) {
                        if (err) *err = "B- inside open span at token " + std::to_string(i);
                        return false;
                    }
                    open = true;
                    open_type = type;
                    open_start = i;
                    break;
                case 'I':
                case 'E':
                    if (!open || open_type != type) {
                        if (err) *err = std::string(1, prefix) + "- without matching B- at token " +
                                        std::to_string(i);
                        return false;
                    }
                    if (prefix == 'E') close(i + 1);
                    break;
            }
        } else { // BIO
            if (prefix == 'E' || prefix == 'S') {
                if (err) *err = std::string(1, prefix) + "- tag in BIO data at token " + std::to_string(i);
                return false;
            }
            if (prefix == 'B') {
                if (open) close(i);
                open = true;
                open_type = type;
                open_start = i;
            } else { // I
                if (!open || open_type != type) {
                    if (err) *err = "I-" + type + " without matching B- at token " + std::to_string(i);
                    return false;
                }
            }
        }
    }
    if (open) {
        if (iobes) {
            if (err) *err = "span open at sentence end";
            return false;
        }
        close(tags.size());
    }
    return true;
}

} // namespace

bool tags_valid(const std::vector<std::string>& tags, TagScheme scheme) {
    return scan_spans(tags, scheme, nullptr, nullptr);
}

std::vector<Span> extract_spans(const TaggedSentence& s, TagScheme scheme) {
    std::vector<Span> spans;
    std::string err;
    if (!scan_spans(s.tags(), scheme, &spans, &err))
        throw SchemeError("invalid " + scheme_name(scheme) + " tag sequence: " + err);
    return spans;
}

std::vector<std::string> spans_to_iobes(const std::vector<Span>& spans, size_t len) {
    std::vector<std::string> tags(len, "O");
    for (const auto& sp : spans) {
        if (sp.end <= sp.start || sp.end > len)
            throw DomainError("span out of range");
        if (sp.end - sp.start == 1) {
            tags[sp.start] = "S-" + sp.type;
        } else {
            tags[sp.start] = "B-" + sp.type;
            for (size_t i = sp.start + 1; i + 1 < sp.end; ++i) tags[i] = "I-" + sp.type;
            tags[sp.end - 1] = "E-" + sp.type;
        }
    }
    return tags;
}

Corpus convert_to_iobes(const Corpus& c) {
    if (c.scheme == TagScheme::IOBES) return c;
    if (c.scheme == TagScheme::TOKEN)
        throw DomainError("TOKEN corpora have no span structure to convert");
    Corpus out;
    out.scheme = TagScheme::IOBES;
    out.sentences.reserve(c.sentences.size());
    for (size_t si = 0; si < c.sentences.size(); ++si) {
        const auto& s = c.sentences[si];
        std::vector<Span> spans;
        try {
            spans = extract_spans(s, c.scheme);
        } catch (const SchemeError& e) {
            throw SchemeError("sentence " + std::to_string(si) + ": " + e.what());
        }
        auto tags = spans_to_iobes(spans, s.tokens.size());
        TaggedSentence ns;
        ns.tokens.reserve(s.tokens.size());
        for (size_t i = 0; i < s.tokens.size(); ++i)
            ns.tokens.push_back({s.tokens[i].surface, tags[i]});
        for (const auto& t : tags)
            if (t != "O") out.tagset.insert(t);
        out.sentences.push_back(std::move(ns));
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

TagScheme infer_scheme(const std::set<std::string>& tags) {
    bool has_bi = false, has_es = false;
    for (const auto& t : tags) {
        if (t.size() >= 2 && t[1] == '-') {
            if (t[0] == 'B' || t[0] == 'I') has_bi = true;
            if (t[0] == 'E' || t[0] == 'S') has_es = true;
        }
    }
    if (has_es) return TagScheme::IOBES;
    if (has_bi) return TagScheme::BIO;
    return TagScheme::TOKEN;
}

} // namespace

Corpus read_conll(std::istream& in, std::optional<TagScheme> scheme) {
    Corpus c;
    TaggedSentence cur;
    std::string line;
    size_t lineno = 0;
    std::set<std::string> seen_tags;
    auto flush = [&]() {
        if (!cur.tokens.empty()) {
            c.sentences.push_back(std::move(cur));
            cur = TaggedSentence{};
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_fields(line);
        if (fields.empty()) {
            flush();
            continue;
        }
        if (fields.size() != 2)
            throw ParseError("line " + std::to_string(lineno) + ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        cur.tokens.push_back({escape_surface(fields[0]), fields[1]});
        seen_tags.insert(fields[1]);
    }
    flush();
    if (c.sentences.empty()) throw ParseError("no sentences in input");
    c.scheme = scheme ? *scheme : infer_scheme(seen_tags);
    seen_tags.erase("O");
    c.tagset = std::move(seen_tags);
    for (size_t si = 0; si < c.sentences.size(); ++si) {
        if (!tags_valid(c.sentences[si].tags(), c.scheme))
            throw SchemeError("sentence " + std::to_string(si) + " is not valid " +
                              scheme_name(c.scheme));
    }
    return c;
}

void write_conll(std::ostream& out, const Corpus& c) {
    for (size_t si = 0; si < c.sentences.size(); ++si) {
        if (si) out << '\n';
        for (const auto& t : c.sentences[si].tokens)
            out << unescape_surface(t.surface) << '\t' << t.tag << '\n';
    }
}

std::vector<std::vector<std::string>> read_unlabeled_text(std::istream& in) {
    std::vector<std::vector<std::string>> sentences;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        for (auto& f : fields) f = escape_surface(f);
        sentences.push_back(std::move(fields));
    }
    if (sentences.empty()) throw ParseError("no sentences in input");
    return sentences;
}

Vocabulary Vocabulary::build(const std::vector<LinearizedSequence>& sequences,
                             const std::set<std::string>& always_keep,
                             int min_count,
                             bool count_always_keep) {
    if (sequences.empty()) throw DomainError("cannot build a vocabulary from no sequences");
    if (min_count < 1) throw DomainError("min_count must be >= 1");

    std::map<std::string, size_t> counts;
    std::vector<std::string> first_seen; // data tokens in order of first appearance
    std::set<std::string> conditions_in_data;
    for (const auto& seq : sequences) {
        for (const auto& tok : seq) {
            if (is_condition_token(tok)) {
                conditions_in_data.insert(tok);
                continue;
            }
            bool counted = count_always_keep || !always_keep.count(tok);
            if (counted) {
                auto [it, fresh] = counts.emplace(tok, 0);
                if (it->second == 0) first_seen.push_back(tok);
                ++it->second;
            } else if (!counts.count(tok)) {
                counts.emplace(tok, 0);
                first_seen.push_back(tok);
            }
        }
    }

    Vocabulary v;
    auto add = [&](const std::string& tok) {
        if (v.token_to_id_.count(tok)) return;
        int id = int(v.id_to_token_.size());
        v.token_to_id_[tok] = id;
        v.id_to_token_.push_back(tok);
    };
    add("[pad]");
    add("[unk]");
    add("[BOS]");
    add("[EOS]");
    for (const auto& cond : kConditionTokens)
        if (conditions_in_data.count(cond) || always_keep.count(cond)) add(cond);
    for (const auto& tok : first_seen) {
        if (always_keep.count(tok) || counts[tok] >= size_t(min_count)) add(tok);
    }
    // tag tokens the data never produced still need ids
    for (const auto& tok : always_keep)
        if (!is_condition_token(tok)) add(tok);
    for (const auto& tok : v.id_to_token_)
        if (is_condition_token(tok)) v.condition_ids_.push_back(v.token_to_id_[tok]);
    return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
    Vocabulary v;
    for (const auto& tok : tokens) {
        if (v.token_to_id_.count(tok)) throw FormatError("duplicate vocabulary entry: " + tok);
        int id = int(v.id_to_token_.size());
        v.token_to_id_[tok] = id;
        v.id_to_token_.push_back(tok);
    }
    for (int i = 0; i < v.size(); ++i)
        if (is_condition_token(v.id_to_token_[i])) v.condition_ids_.push_back(i);
    if (v.size() < 4 || v.id_to_token_[pad_id] != "[pad]" || v.id_to_token_[unk_id] != "[unk]" ||
        v.id_to_token_[bos_id] != "[BOS]" || v.id_to_token_[eos_id] != "[EOS]")
        throw FormatError("vocabulary is missing the fixed control tokens");
    return v;
}

int Vocabulary::encode(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? unk_id : it->second;
}

const std::string& Vocabulary::decode(int id) const {
    if (id < 0 || id >= size()) throw DomainError("token id out of range: " + std::to_string(id));
    return id_to_token_[size_t(id)];
}

bool Vocabulary::contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

int average_linearized_length(const std::vector<LinearizedSequence>& sequences) {
    if (sequences.empty()) throw DomainError("no sequences to average over");
    double total = 0;
    for (const auto& s : sequences) {
        size_t n = s.size();
        if (!s.empty() && is_condition_token(s[0])) --n;  // condition prefix is not body
        total += double(n);
    }
    long r = std::lround(total / double(sequences.size()));
    return int(std::max(1l, r));
}

} // namespace tagaug
