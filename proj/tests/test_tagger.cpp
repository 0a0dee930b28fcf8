#include "doctest.h"

#include "tagaug/tagger.hpp"
#include "tagaug/toy_grammar.hpp"

#include <set>
#include <sstream>

using namespace tagaug;

namespace {

// Reference decoder: scores every possible tag path with a left-to-right
// running sum, exactly as the DP does, and keeps the strict maximum.
// Weights are drawn from a continuous range so ties cannot occur.
std::vector<std::string> enumerate_best(const TaggerModel& m,
                                        const std::vector<std::string>& words) {
    size_t n = words.size(), T = m.tags.size();
    std::vector<std::vector<std::string>> feats;
    for (size_t i = 0; i < n; ++i) feats.push_back(token_features(words, i));

    std::vector<size_t> path(n, 0), best_path;
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        double score = 0;
        for (size_t i = 0; i < n; ++i) {
            for (const auto& f : feats[i]) {
                auto it = m.emission.find(f);
                if (it != m.emission.end()) score += it->second[path[i]];
            }
            if (i > 0) score += m.trans(int(path[i - 1]), int(path[i]));
        }
        if (score > best) {
            best = score;
            best_path = path;
        }
        size_t k = n;
        while (k > 0) {
            if (++path[k - 1] < T) break;
            path[k - 1] = 0;
            --k;
        }
        if (k == 0) break;
    }
    std::vector<std::string> out;
    for (size_t i : best_path) out.push_back(m.tags[i]);
    return out;
}

TaggerModel random_model(const std::vector<std::string>& tags,
                         const std::vector<std::vector<std::string>>& sentences,
                         Rng& rng) {
    TaggerModel m;
    m.scheme = TagScheme::TOKEN;
    m.tags = tags; // callers pass them sorted
    size_t T = tags.size();
    m.transition.assign(T * T, 0.0);
    for (auto& v : m.transition) v = rng.uniform(-1.0, 1.0);
    for (const auto& words : sentences)
        for (size_t i = 0; i < words.size(); ++i)
            for (const auto& f : token_features(words, i)) {
                auto [it, fresh] = m.emission.try_emplace(f);
                if (fresh) {
                    it->second.resize(T);
                    for (auto& v : it->second) v = rng.uniform(-1.0, 1.0);
                }
            }
    return m;
}

Corpus sentences_to_corpus(const std::vector<TaggedSentence>& sents, TagScheme scheme) {
    Corpus c;
    c.scheme = scheme;
    c.sentences = sents;
    for (const auto& s : sents)
        for (const auto& t : s.tokens)
            if (t.tag != "O") c.tagset.insert(t.tag);
    return c;
}

} // namespace

TEST_SUITE_BEGIN("tagger");

TEST_CASE("word shape collapses runs per character class") {
    CHECK(word_shape("McDonald-7") == "XxXxod");
    CHECK(word_shape("ABC") == "X");
    CHECK(word_shape("quiet") == "x");
    CHECK(word_shape("1984") == "d");
    CHECK(word_shape("U.N.") == "XoXo");
    CHECK(word_shape("") == "");
}

TEST_CASE("the seven token features carry the documented context") {
    std::vector<std::string> words = {"Visit", "Avalon"};
    auto f0 = token_features(words, 0);
    REQUIRE(f0.size() == 7);
    CHECK(f0[0] == "w=Visit");
    CHECK(f0[1] == "lw=visit");
    CHECK(f0[2] == "p3=Vis");
    CHECK(f0[3] == "s3=sit");
    CHECK(f0[4] == "sh=Xx");
    CHECK(f0[5] == "pw=<s>");
    CHECK(f0[6] == "nw=Avalon");
    auto f1 = token_features(words, 1);
    CHECK(f1[5] == "pw=Visit");
    CHECK(f1[6] == "nw=</s>");
    // short words use the whole surface for both affixes
    auto fs = token_features({"to"}, 0);
    CHECK(fs[2] == "p3=to");
    CHECK(fs[3] == "s3=to");
}

TEST_CASE("averaging tracks the post-step running mean") {
    AveragedWeights w(2);
    w.add(0, 1.0, 1);
    CHECK(w.finalize(3)[0] == doctest::Approx(1.0).epsilon(1e-15));

    AveragedWeights v(1);
    v.add(0, 1.0, 2);
    v.add(0, -1.0, 3);
    // values at the end of steps 1..3 are 0, 1, 0
    CHECK(v.finalize(3)[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));

    AveragedWeights u(1);
    u.add(0, 2.0, 1);
    u.add(0, 3.0, 1); // second update inside the same step
    CHECK(u.finalize(2)[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(u.finalize(4)[0] == doctest::Approx(5.0).epsilon(1e-15));

    CHECK(AveragedWeights(1).finalize(0)[0] == 0.0);
}

TEST_CASE("viterbi agrees with exhaustive path enumeration") {
    std::vector<std::string> pool = {"Avalon", "visited", "the", "Meridian",
                                     "games", "on", "Friday", "U.N."};
    std::vector<std::vector<std::string>> tagsets = {
        {"A", "B"}, {"A", "B", "C"}, {"A", "B", "C", "D"}};
    Rng rng(31415);
    for (int iter = 0; iter < 1000; ++iter) {
        size_t len = 1 + size_t(rng.below(6));
        std::vector<std::string> words;
        for (size_t i = 0; i < len; ++i) words.push_back(pool[size_t(rng.below(pool.size()))]);
        const auto& tags = tagsets[size_t(rng.below(tagsets.size()))];
        auto m = random_model(tags, {words}, rng);
        auto got = predict(m, words);
        auto want = enumerate_best(m, words);
        REQUIRE(got == want);
    }
}

TEST_CASE("score ties resolve through the backpointers, low id first") {
    TaggerModel m;
    m.scheme = TagScheme::TOKEN;
    m.tags = {"A", "B"};
    m.transition.assign(4, 0.0);

    // a fully tied model decodes to the all-lowest path
    CHECK(predict(m, {"x", "y", "z"}) == std::vector<std::string>{"A", "A", "A"});

    // paths BA and AB tie at the top; the final argmax picks the lower
    // last tag, whose best predecessor is B
    m.transition[0 * 2 + 1] = 1.0; // A -> B
    m.transition[1 * 2 + 0] = 1.0; // B -> A
    CHECK(predict(m, {"x", "y"}) == std::vector<std::string>{"B", "A"});
}

TEST_CASE("constrained decoding never emits an invalid tag sequence") {
    std::vector<std::string> iobes_tags = {"B-PER", "E-PER", "I-PER", "O", "S-PER"};
    std::vector<std::string> bio_tags = {"B-PER", "I-PER", "O"};
    Rng rng(777);
    std::vector<std::string> pool = {"a", "b", "c", "d"};
    for (int iter = 0; iter < 400; ++iter) {
        bool iobes = iter % 2 == 0;
        size_t len = 1 + size_t(rng.below(5));
        std::vector<std::string> words;
        for (size_t i = 0; i < len; ++i) words.push_back(pool[size_t(rng.below(pool.size()))]);
        auto m = random_model(iobes ? iobes_tags : bio_tags, {words}, rng);
        m.scheme = iobes ? TagScheme::IOBES : TagScheme::BIO;
        auto constrained = viterbi_decode(m, words, true);
        CHECK(tags_valid(constrained, m.scheme));
        // and the unconstrained path scores at least as high
        auto free_tags = viterbi_decode(m, words, false);
        CHECK(free_tags.size() == len);
    }
}

TEST_CASE("a model that loves illegal tags still decodes validly when constrained") {
    TaggerModel m;
    m.scheme = TagScheme::IOBES;
    m.tags = {"B-PER", "E-PER", "I-PER", "O", "S-PER"};
    m.transition.assign(25, 0.0);
    std::vector<std::string> words = {"x", "x", "x"};
    for (size_t i = 0; i < words.size(); ++i)
        for (const auto& f : token_features(words, i)) {
            auto& row = m.emission[f];
            row.assign(5, 0.0);
            row[1] = 10.0; // E-PER everywhere: never a legal start
        }
    auto loose = predict(m, words);
    CHECK(loose == std::vector<std::string>(3, "E-PER"));
    CHECK_FALSE(tags_valid(loose, TagScheme::IOBES));
    auto strict = viterbi_decode(m, words, true);
    CHECK(tags_valid(strict, TagScheme::IOBES));
}

TEST_CASE("training separates the toy corpus almost perfectly") {
    auto splits = gen_toy_splits(demo_grammar(), 300, 0, 120, 11);
    auto model = train_tagger(splits.train, 10, 1);
    REQUIRE(!model.tags.empty());
    CHECK(std::is_sorted(model.tags.begin(), model.tags.end()));

    auto self = evaluate(splits.train,
                         tag_corpus(model, [&] {
                             std::vector<std::vector<std::string>> w;
                             for (const auto& s : splits.train.sentences) w.push_back(s.words());
                             return w;
                         }()),
                         EvalMode::Span);
    CHECK(self.f1 > 0.99);

    std::vector<std::vector<std::string>> test_words;
    for (const auto& s : splits.test.sentences) test_words.push_back(s.words());
    auto held = evaluate(splits.test, tag_corpus(model, test_words), EvalMode::Span);
    CHECK(held.f1 > 0.8);

    // every prediction is scheme valid, so span extraction cannot throw
    auto pred = tag_corpus(model, test_words);
    for (const auto& s : pred.sentences) CHECK(tags_valid(s.tags(), pred.scheme));
}

TEST_CASE("training is deterministic per seed") {
    auto c = gen_toy_corpus(demo_grammar(), 120, 5);
    auto a = train_tagger(c, 4, 9);
    auto b = train_tagger(c, 4, 9);
    std::ostringstream sa, sb;
    save_tagger(sa, a);
    save_tagger(sb, b);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("tagger models survive save and load") {
    auto c = gen_toy_corpus(demo_grammar(), 80, 13);
    auto m = train_tagger(c, 3, 2);
    std::ostringstream out;
    save_tagger(out, m);
    std::istringstream in(out.str());
    auto back = load_tagger(in);

    CHECK(back.scheme == m.scheme);
    CHECK(back.tags == m.tags);
    std::ostringstream out2;
    save_tagger(out2, back);
    CHECK(out2.str() == out.str());

    for (const auto& s : c.sentences) CHECK(predict(back, s.words()) == predict(m, s.words()));

    std::istringstream bad("not a tagger\n");
    CHECK_THROWS_AS(load_tagger(bad), FormatError);
}

TEST_CASE("span scoring matches the textbook example") {
    // gold holds two spans; the prediction finds one of them exactly
    TaggedSentence gold_s;
    gold_s.tokens = {{"Alan", "B-PER"}, {"Turing", "E-PER"}, {"visited", "O"}, {"Avalon", "S-LOC"}};
    TaggedSentence pred_s;
    pred_s.tokens = {{"Alan", "B-PER"}, {"Turing", "E-PER"}, {"visited", "O"}, {"Avalon", "O"}};
    auto gold = sentences_to_corpus({gold_s}, TagScheme::IOBES);
    auto pred = sentences_to_corpus({pred_s}, TagScheme::IOBES);

    auto r = evaluate(gold, pred, EvalMode::Span);
    CHECK(r.precision == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(r.gold_spans == 2);
    CHECK(r.pred_spans == 1);
    CHECK(r.matched_spans == 1);
    CHECK(r.accuracy == doctest::Approx(0.75).epsilon(1e-12));

    auto t = evaluate(gold, pred, EvalMode::Token);
    CHECK(t.mode == EvalMode::Token);
    CHECK(t.accuracy == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("span scoring agrees with a set intersection oracle") {
    Rng rng(4242);
    for (int iter = 0; iter < 300; ++iter) {
        size_t n_sents = 1 + rng.below(5);
        std::vector<TaggedSentence> gold_s, pred_s;
        size_t oracle_gold = 0, oracle_pred = 0, oracle_match = 0;
        size_t tokens = 0, correct = 0;
        for (size_t s = 0; s < n_sents; ++s) {
            size_t len = 1 + size_t(rng.below(8));
            auto random_spans = [&] {
                std::vector<Span> spans;
                size_t pos = 0;
                while (pos < len) {
                    if (rng.bernoulli(0.4)) {
                        size_t w = 1 + size_t(rng.below(std::min<uint64_t>(3, len - pos)));
                        spans.push_back({rng.bernoulli(0.5) ? "PER" : "LOC", pos, pos + w});
                        pos += w;
                    } else {
                        ++pos;
                    }
                }
                return spans;
            };
            auto g_spans = random_spans();
            auto p_spans = random_spans();
            auto g_tags = spans_to_iobes(g_spans, len);
            auto p_tags = spans_to_iobes(p_spans, len);
            TaggedSentence g, p;
            for (size_t i = 0; i < len; ++i) {
                g.tokens.push_back({"w" + std::to_string(i), g_tags[i]});
                p.tokens.push_back({"w" + std::to_string(i), p_tags[i]});
                ++tokens;
                correct += g_tags[i] == p_tags[i];
            }
            gold_s.push_back(g);
            pred_s.push_back(p);
            std::set<Span> gs(g_spans.begin(), g_spans.end());
            std::set<Span> ps(p_spans.begin(), p_spans.end());
            oracle_gold += gs.size();
            oracle_pred += ps.size();
            for (const auto& sp : ps) oracle_match += gs.count(sp);
        }
        auto gold = sentences_to_corpus(gold_s, TagScheme::IOBES);
        auto pred = sentences_to_corpus(pred_s, TagScheme::IOBES);
        auto r = evaluate(gold, pred, EvalMode::Span);
        REQUIRE(r.gold_spans == oracle_gold);
        REQUIRE(r.pred_spans == oracle_pred);
        REQUIRE(r.matched_spans == oracle_match);
        double p_ = oracle_pred ? double(oracle_match) / double(oracle_pred) : 0.0;
        double r_ = oracle_gold ? double(oracle_match) / double(oracle_gold) : 0.0;
        double f = p_ + r_ > 0 ? 2 * p_ * r_ / (p_ + r_) : 0.0;
        REQUIRE(std::abs(r.precision - p_) < 1e-12);
        REQUIRE(std::abs(r.recall - r_) < 1e-12);
        REQUIRE(std::abs(r.f1 - f) < 1e-12);
        REQUIRE(r.accuracy == doctest::Approx(double(correct) / double(tokens)).epsilon(1e-12));
    }
}

TEST_CASE("evaluation rejects misaligned corpora and handles empty span sets") {
    TaggedSentence a, b;
    a.tokens = {{"x", "O"}};
    b.tokens = {{"x", "O"}, {"y", "O"}};
    auto g1 = sentences_to_corpus({a}, TagScheme::IOBES);
    auto p1 = sentences_to_corpus({b}, TagScheme::IOBES);
    CHECK_THROWS_AS(evaluate(g1, p1, EvalMode::Span), DomainError);

    auto same = sentences_to_corpus({a}, TagScheme::IOBES);
    auto r = evaluate(same, same, EvalMode::Span);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
    CHECK(r.accuracy == 1.0);
}

TEST_CASE("reports serialize every headline number") {
    EvalReport r;
    r.mode = EvalMode::Span;
    r.precision = 0.5;
    r.recall = 0.25;
    r.f1 = 1.0 / 3;
    r.accuracy = 0.75;
    r.gold_spans = 4;
    r.pred_spans = 2;
    r.matched_spans = 1;
    r.tokens = 8;
    r.correct_tokens = 6;
    std::ostringstream out;
    write_eval_report(out, r);
    auto text = out.str();
    for (const char* key : {"precision=", "recall=", "f1=", "accuracy=", "gold_spans=4"})
        CHECK(text.find(key) != std::string::npos);
    auto tsv = eval_report_tsv(r);
    CHECK(tsv.find('\t') != std::string::npos);
}

TEST_SUITE_END();
