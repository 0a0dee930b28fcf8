#include "tagaug/linearize.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace tagaug {

std::string order_name(LinearizeOrder o) {
    return o == LinearizeOrder::TagWord ? "tag-word" : "word-tag";
}

LinearizeOrder order_from_name(const std::string& name) {
    if (name == "tag-word") return LinearizeOrder::TagWord;
    if (name == "word-tag") return LinearizeOrder::WordTag;
    throw DomainError("unknown linearization order: " + name);
}

LinearizedSequence linearize(const TaggedSentence& s, const LinearizeConfig& cfg) {
    if (s.tokens.empty()) throw DomainError("cannot linearize an empty sentence");
    LinearizedSequence seq;
    if (cfg.condition) {
        if (!is_condition_token(*cfg.condition))
            throw DomainError("not a condition token: " + *cfg.condition);
        seq.push_back(*cfg.condition);
    }
    for (const auto& t : s.tokens) {
        bool emit_tag = !(cfg.drop_o && t.tag == "O");
        if (cfg.order == LinearizeOrder::TagWord) {
            if (emit_tag) seq.push_back(t.tag);
            seq.push_back(t.surface);
        } else {
            seq.push_back(t.surface);
            if (emit_tag) seq.push_back(t.tag);
        }
    }
    return seq;
}

std::vector<LinearizedSequence> linearize_corpus(const Corpus& c, const LinearizeConfig& cfg) {
    std::vector<LinearizedSequence> out;
    out.reserve(c.sentences.size());
    for (const auto& s : c.sentences) out.push_back(linearize(s, cfg));
    return out;
}

namespace {

bool forbidden_inside(const std::string& tok) {
    return tok == "[BOS]" || tok == "[EOS]" || tok == "[pad]" || is_condition_token(tok);
}

DelinearizeResult fail(const std::string& why) {
    DelinearizeResult r;
    r.status = DelinearizeStatus::Malformed;
    r.error = why;
    return r;
}

} // namespace

DelinearizeResult try_delinearize(const LinearizedSequence& seq, const LinearizeConfig& cfg,
                                  const std::set<std::string>& tagset) {
    DelinearizeResult res;
    size_t begin = 0;
    if (!seq.empty() && is_condition_token(seq[0])) {
        res.condition = seq[0];
        begin = 1;
    }
    if (begin >= seq.size()) return fail("no tokens");

    // With explicit "O" tags in the stream, "O" must be recognized as a tag.
    auto is_tag = [&](const std::string& tok) {
        return tagset.count(tok) > 0 || (!cfg.drop_o && tok == "O");
    };

    TaggedSentence sent;
    if (cfg.order == LinearizeOrder::TagWord) {
        std::string pending_tag;
        bool have_tag = false;
        for (size_t i = begin; i < seq.size(); ++i) {
            const std::string& tok = seq[i];
            if (forbidden_inside(tok)) return fail("control token inside sequence");
            if (is_tag(tok)) {
                if (have_tag) return fail("two tags in a row");
                pending_tag = tok;
                have_tag = true;
            } else {
                if (!have_tag && !cfg.drop_o) return fail("word without a preceding tag");
                sent.tokens.push_back({tok, have_tag ? pending_tag : "O"});
                have_tag = false;
            }
        }
        if (have_tag) return fail("dangling tag at sequence end");
    } else { // WordTag
        std::string pending_word;
        bool have_word = false;
        for (size_t i = begin; i < seq.size(); ++i) {
            const std::string& tok = seq[i];
            if (forbidden_inside(tok)) return fail("control token inside sequence");
            if (is_tag(tok)) {
                if (!have_word) return fail("tag without a preceding word");
                sent.tokens.push_back({pending_word, tok});
                have_word = false;
            } else {
                if (have_word) {
                    if (!cfg.drop_o) return fail("word without a following tag");
                    sent.tokens.push_back({pending_word, "O"});
                }
                pending_word = tok;
                have_word = true;
            }
        }
        if (have_word) {
            if (!cfg.drop_o) return fail("word without a following tag");
            sent.tokens.push_back({pending_word, "O"});
        }
    }
    if (sent.tokens.empty()) return fail("no word tokens");
    res.status = DelinearizeStatus::Ok;
    res.sentence = std::move(sent);
    return res;
}

TaggedSentence delinearize(const LinearizedSequence& seq, const LinearizeConfig& cfg,
                           const std::set<std::string>& tagset) {
    auto r = try_delinearize(seq, cfg, tagset);
    if (r.status != DelinearizeStatus::Ok)
        throw ParseError("malformed linearized sequence: " + r.error);
    return r.sentence;
}

std::vector<LinearizedSequence> read_linearized(std::istream& in) {
    std::vector<LinearizedSequence> seqs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        LinearizedSequence seq;
        size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && line[i] == ' ') ++i;
            size_t j = i;
            while (j < line.size() && line[j] != ' ') ++j;
            if (j > i) seq.push_back(line.substr(i, j - i));
            i = j;
        }
        // a blank line is an empty sequence (a sampler can emit one), so
        // write/read round trips preserve counts
        seqs.push_back(std::move(seq));
    }
    return seqs;
}

void write_linearized(std::ostream& out, const std::vector<LinearizedSequence>& seqs) {
    for (const auto& seq : seqs) {
        for (size_t i = 0; i < seq.size(); ++i) {
            if (i) out << ' ';
            out << seq[i];
        }
        out << '\n';
    }
}

} // namespace tagaug
