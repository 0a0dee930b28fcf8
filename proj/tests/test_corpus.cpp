#include "doctest.h"

#include "tagaug/corpus.hpp"
#include "tagaug/rng.hpp"
#include "tagaug/toy_grammar.hpp"

#include <optional>
#include <sstream>

using namespace tagaug;

namespace {

// Independent reference scanner: parses a tag string as a sequence of
// O / S-X / B-X I-X* E-X blocks. Deliberately pattern-based rather than a
// state machine so it shares no structure with the library scanner.
std::optional<std::vector<Span>> oracle_iobes(const std::vector<std::string>& tags) {
    std::vector<Span> spans;
    size_t i = 0;
    while (i < tags.size()) {
        const std::string& t = tags[i];
        if (t == "O") {
            ++i;
            continue;
        }
        if (t.rfind("S-", 0) == 0) {
            spans.push_back({t.substr(2), i, i + 1});
            ++i;
            continue;
        }
        if (t.rfind("B-", 0) == 0) {
            std::string type = t.substr(2);
            size_t j = i + 1;
            while (j < tags.size() && tags[j] == "I-" + type) ++j;
            if (j < tags.size() && tags[j] == "E-" + type) {
                spans.push_back({type, i, j + 1});
                i = j + 1;
                continue;
            }
            return std::nullopt;
        }
        return std::nullopt;
    }
    return spans;
}

std::optional<std::vector<Span>> oracle_bio(const std::vector<std::string>& tags) {
    std::vector<Span> spans;
    size_t i = 0;
    while (i < tags.size()) {
        const std::string& t = tags[i];
        if (t == "O") {
            ++i;
            continue;
        }
        if (t.rfind("B-", 0) == 0) {
            std::string type = t.substr(2);
            size_t j = i + 1;
            while (j < tags.size() && tags[j] == "I-" + type) ++j;
            spans.push_back({type, i, j});
            i = j;
            continue;
        }
        return std::nullopt;
    }
    return spans;
}

TaggedSentence with_tags(const std::vector<std::string>& tags) {
    TaggedSentence s;
    for (size_t i = 0; i < tags.size(); ++i) s.tokens.push_back({"w" + std::to_string(i), tags[i]});
    return s;
}

} // namespace

TEST_SUITE_BEGIN("corpus");

TEST_CASE("conll reading splits sentences on blank lines") {
    std::istringstream in("U.N.\tS-ORG\nofficial\tO\n\nEkeus\tS-PER\n");
    Corpus c = read_conll(in);
    REQUIRE(c.sentences.size() == 2);
    CHECK(c.sentences[0].tokens.size() == 2);
    CHECK(c.sentences[1].tokens.size() == 1);
    CHECK(c.scheme == TagScheme::IOBES);
    CHECK(c.tagset == std::set<std::string>{"S-ORG", "S-PER"});
}

TEST_CASE("conll reading accepts space separated columns and CRLF") {
    std::istringstream in("London  S-LOC\r\n");
    Corpus c = read_conll(in);
    REQUIRE(c.sentences.size() == 1);
    CHECK(c.sentences[0].tokens[0] == Token{"London", "S-LOC"});
}

TEST_CASE("conll reading rejects malformed lines with their line number") {
    std::istringstream in("good\tO\nbad line with extra\tfields\n");
    CHECK_THROWS_WITH_AS(read_conll(in), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("conll reading rejects empty input") {
    std::istringstream in("\n\n");
    CHECK_THROWS_AS(read_conll(in), ParseError);
}

TEST_CASE("conll reading validates against the inferred scheme") {
    std::istringstream in("a\tB-LOC\nb\tO\n"); // B- without E- under IOBES? inferred BIO, fine
    Corpus c = read_conll(in);
    CHECK(c.scheme == TagScheme::BIO);

    std::istringstream bad("a\tE-LOC\nb\tO\n"); // E- first is invalid IOBES
    CHECK_THROWS_AS(read_conll(bad), SchemeError);
}

TEST_CASE("scheme inference distinguishes token corpora") {
    std::istringstream in("runs\tVERB\nfast\tADV\n");
    Corpus c = read_conll(in);
    CHECK(c.scheme == TagScheme::TOKEN);
    CHECK(c.tagset == std::set<std::string>{"VERB", "ADV"});
}

TEST_CASE("reserved surfaces are escaped on read and restored on write") {
    std::istringstream in("[BOS]\tO\n\\[EOS]\tO\nnormal\tO\n");
    Corpus c = read_conll(in, TagScheme::IOBES);
    CHECK(c.sentences[0].tokens[0].surface == "\\[BOS]");
    CHECK(c.sentences[0].tokens[1].surface == "\\\\[EOS]");
    CHECK(c.sentences[0].tokens[2].surface == "normal");
    std::ostringstream out;
    write_conll(out, c);
    CHECK(out.str() == "[BOS]\tO\n\\[EOS]\tO\nnormal\tO\n");
}

TEST_CASE("conll round trip is the identity on random toy corpora") {
    Corpus c = gen_toy_corpus(demo_grammar(), 300, 77);
    std::ostringstream out;
    write_conll(out, c);
    std::istringstream in(out.str());
    Corpus back = read_conll(in);
    REQUIRE(back.sentences.size() == c.sentences.size());
    CHECK(back.sentences == c.sentences);
    CHECK(back.scheme == c.scheme);
}

TEST_CASE("span extraction matches hand counted spans") {
    auto s = with_tags({"B-PER", "E-PER", "O", "S-LOC"});
    auto spans = extract_spans(s, TagScheme::IOBES);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0] == Span{"PER", 0, 2});
    CHECK(spans[1] == Span{"LOC", 3, 4});
}

TEST_CASE("span extraction agrees with the reference scanner on random tags") {
    std::vector<std::string> alphabet = {"O",   "B-A", "I-A", "E-A", "S-A",
                                         "B-B", "I-B", "E-B", "S-B"};
    Rng rng(1234);
    size_t valid_seen = 0, invalid_seen = 0;
    for (int iter = 0; iter < 4000; ++iter) {
        size_t len = 1 + size_t(rng.below(8));
        std::vector<std::string> tags;
        for (size_t i = 0; i < len; ++i) tags.push_back(alphabet[size_t(rng.below(alphabet.size()))]);
        auto expect = oracle_iobes(tags);
        auto s = with_tags(tags);
        if (expect) {
            ++valid_seen;
            REQUIRE(tags_valid(tags, TagScheme::IOBES));
            CHECK(extract_spans(s, TagScheme::IOBES) == *expect);
        } else {
            ++invalid_seen;
            REQUIRE_FALSE(tags_valid(tags, TagScheme::IOBES));
            CHECK_THROWS_AS(extract_spans(s, TagScheme::IOBES), SchemeError);
        }
    }
    // the generator must exercise both sides
    CHECK(valid_seen > 100);
    CHECK(invalid_seen > 100);
}

TEST_CASE("bio span extraction agrees with the reference scanner") {
    std::vector<std::string> alphabet = {"O", "B-A", "I-A", "B-B", "I-B"};
    Rng rng(99);
    for (int iter = 0; iter < 4000; ++iter) {
        size_t len = 1 + size_t(rng.below(8));
        std::vector<std::string> tags;
        for (size_t i = 0; i < len; ++i) tags.push_back(alphabet[size_t(rng.below(alphabet.size()))]);
        auto expect = oracle_bio(tags);
        auto s = with_tags(tags);
        if (expect) {
            REQUIRE(tags_valid(tags, TagScheme::BIO));
            CHECK(extract_spans(s, TagScheme::BIO) == *expect);
        } else {
            REQUIRE_FALSE(tags_valid(tags, TagScheme::BIO));
            CHECK_THROWS_AS(extract_spans(s, TagScheme::BIO), SchemeError);
        }
    }
}

TEST_CASE("token scheme has no spans and accepts any labels") {
    auto s = with_tags({"NOUN", "VERB"});
    CHECK(tags_valid(s.tags(), TagScheme::TOKEN));
    CHECK(extract_spans(s, TagScheme::TOKEN).empty());
}

TEST_CASE("bio to iobes conversion keeps the span set") {
    std::istringstream in(
        "Alan\tB-PER\nTuring\tI-PER\nvisited\tO\nLondon\tB-LOC\n");
    Corpus bio = read_conll(in);
    REQUIRE(bio.scheme == TagScheme::BIO);
    Corpus iobes = convert_to_iobes(bio);
    CHECK(iobes.scheme == TagScheme::IOBES);
    CHECK(iobes.sentences[0].tags() ==
          std::vector<std::string>{"B-PER", "E-PER", "O", "S-LOC"});
    CHECK(extract_spans(iobes.sentences[0], TagScheme::IOBES) ==
          extract_spans(bio.sentences[0], TagScheme::BIO));
    CHECK(iobes.tagset == std::set<std::string>{"B-PER", "E-PER", "S-LOC"});
}

TEST_CASE("iobes conversion is a fixed point on iobes corpora") {
    Corpus c = gen_toy_corpus(demo_grammar(), 50, 3);
    Corpus again = convert_to_iobes(c);
    CHECK(again.sentences == c.sentences);
}

TEST_CASE("vocabulary applies the frequency threshold to words only") {
    std::vector<LinearizedSequence> seqs = {
        {"S-PER", "Sandrine", "plays"},
        {"S-PER", "Sandrine", "rests"},
        {"S-PER", "Sandrine", "plays"},
        {"S-LOC", "Nixon"},
    };
    auto v = Vocabulary::build(seqs, {"S-PER", "S-LOC"}, 2);
    CHECK(v.contains("Sandrine"));
    CHECK(v.contains("plays"));
    CHECK_FALSE(v.contains("Nixon"));
    CHECK_FALSE(v.contains("rests"));
    CHECK(v.contains("S-LOC")); // tag tokens survive any threshold
    CHECK(v.encode("Nixon") == Vocabulary::unk_id);
    CHECK(v.encode("Sandrine") != Vocabulary::unk_id);
}

TEST_CASE("vocabulary pins the control token ids") {
    std::vector<LinearizedSequence> seqs = {{"a", "a"}};
    auto v = Vocabulary::build(seqs, {}, 1);
    CHECK(v.decode(Vocabulary::pad_id) == "[pad]");
    CHECK(v.decode(Vocabulary::unk_id) == "[unk]");
    CHECK(v.decode(Vocabulary::bos_id) == "[BOS]");
    CHECK(v.decode(Vocabulary::eos_id) == "[EOS]");
    CHECK(v.size() == 5);
    CHECK(v.encode("a") == 4);
}

TEST_CASE("vocabulary ids are dense and bijective") {
    Corpus c = gen_toy_corpus(demo_grammar(), 200, 5);
    std::vector<LinearizedSequence> seqs;
    for (const auto& s : c.sentences) {
        LinearizedSequence q;
        for (const auto& t : s.tokens) {
            if (t.tag != "O") q.push_back(t.tag);
            q.push_back(t.surface);
        }
        seqs.push_back(q);
    }
    auto v = Vocabulary::build(seqs, c.tagset, 2);
    for (int id = 0; id < v.size(); ++id) CHECK(v.encode(v.decode(id)) == id);
}

TEST_CASE("vocabulary records condition token ids") {
    std::vector<LinearizedSequence> seqs = {{"[labeled]", "a", "a"}, {"[unlabeled]", "b", "b"}};
    auto v = Vocabulary::build(seqs, {}, 1);
    REQUIRE(v.condition_ids().size() == 2);
    CHECK(v.decode(v.condition_ids()[0]) == "[labeled]");
    CHECK(v.decode(v.condition_ids()[1]) == "[unlabeled]");
}

TEST_CASE("vocabulary rejects degenerate inputs") {
    CHECK_THROWS_AS(Vocabulary::build({}, {}, 2), DomainError);
    CHECK_THROWS_AS(Vocabulary::build({{"a"}}, {}, 0), DomainError);
}

TEST_CASE("average linearized length rounds to nearest and clamps at one") {
    std::vector<LinearizedSequence> four_six = {LinearizedSequence(4, "x"),
                                                LinearizedSequence(6, "x")};
    CHECK(average_linearized_length(four_six) == 5);
    std::vector<LinearizedSequence> half = {LinearizedSequence(4, "x"),
                                            LinearizedSequence(5, "x")};
    CHECK(average_linearized_length(half) == 5); // 4.5 rounds away from zero
    std::vector<LinearizedSequence> one = {LinearizedSequence(1, "x")};
    CHECK(average_linearized_length(one) == 1);
    CHECK_THROWS_AS(average_linearized_length({}), DomainError);

    // a leading condition token is overhead, not body
    std::vector<LinearizedSequence> conditioned = {
        {"[labeled]", "S-LOC", "Arvale", "visits", "O"},
        {"[KB]", "w", "w", "w", "w"}};
    CHECK(average_linearized_length(conditioned) == 4);
    std::vector<LinearizedSequence> bare_condition = {{"[labeled]"}};
    CHECK(average_linearized_length(bare_condition) == 1); // clamps up from 0
}

TEST_CASE("unlabeled text loader tokenizes and escapes") {
    std::istringstream in("the [BOS] trick\n\nEkeus speaks\n");
    auto sents = read_unlabeled_text(in);
    REQUIRE(sents.size() == 2);
    CHECK(sents[0] == std::vector<std::string>{"the", "\\[BOS]", "trick"});
    CHECK(sents[1] == std::vector<std::string>{"Ekeus", "speaks"});
}

TEST_SUITE_END();
