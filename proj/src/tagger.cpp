#include "tagaug/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tagaug {

int TaggerModel::tag_id(const std::string& tag) const {
    auto it = std::lower_bound(tags.begin(), tags.end(), tag);
    if (it == tags.end() || *it != tag) return -1;
    return int(it - tags.begin());
}

std::string word_shape(const std::string& w) {
    std::string shape;
    char prev = 0;
    for (char c : w) {
        char cls;
        if (c >= 'A' && c <= 'Z') cls = 'X';
        else if (c >= 'a' && c <= 'z') cls = 'x';
        else if (c >= '0' && c <= '9') cls = 'd';
        else cls = 'o';
        if (cls != prev) shape += cls;
        prev = cls;
    }
    return shape;
}

namespace {

std::string lowercase(const std::string& w) {
    std::string s = w;
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
    return s;
}

} // namespace

std::vector<std::string> token_features(const std::vector<std::string>& words, size_t i) {
    const std::string& w = words[i];
    std::vector<std::string> f;
    f.reserve(7);
    f.push_back("w=" + w);
    f.push_back("lw=" + lowercase(w));
    f.push_back("p3=" + w.substr(0, 3));
    f.push_back("s3=" + (w.size() <= 3 ? w : w.substr(w.size() - 3)));
    f.push_back("sh=" + word_shape(w));
    f.push_back("pw=" + (i == 0 ? std::string("<s>") : words[i - 1]));
    f.push_back("nw=" + (i + 1 == words.size() ? std::string("</s>") : words[i + 1]));
    return f;
}

namespace {

struct TagInfo {
    char prefix = 0;   // B/I/E/S or 0 for bare labels
    std::string type;
};

TagInfo tag_info(const std::string& tag) {
    TagInfo ti;
    if (tag.size() >= 2 && tag[1] == '-' &&
        (tag[0] == 'B' || tag[0] == 'I' || tag[0] == 'E' || tag[0] == 'S')) {
        ti.prefix = tag[0];
        ti.type = tag.substr(2);
    }
    return ti;
}

// Scheme-legal transition structure used by constrained decoding.
struct SchemeRules {
    bool active = false;
    std::vector<bool> start, end;   // per tag
    std::vector<bool> pair;         // prev * T + cur

    SchemeRules(const std::vector<std::string>& tags, TagScheme scheme, bool constrain) {
        size_t T = tags.size();
        start.assign(T, true);
        end.assign(T, true);
        pair.assign(T * T, true);
        if (!constrain || scheme == TagScheme::TOKEN) return;
        active = true;
        std::vector<TagInfo> info(T);
        for (size_t i = 0; i < T; ++i) info[i] = tag_info(tags[i]);
        bool iobes = scheme == TagScheme::IOBES;
        auto outside = [&](const TagInfo& t) {
            return t.prefix == 0 || t.prefix == 'S' || (iobes ? t.prefix == 'E' : false);
        };
        for (size_t i = 0; i < T; ++i) {
            const TagInfo& t = info[i];
            if (t.prefix == 'I' || (iobes && t.prefix == 'E')) start[i] = false;
            if (iobes && (t.prefix == 'B' || t.prefix == 'I')) end[i] = false;
        }
        for (size_t p = 0; p < T; ++p) {
            for (size_t c = 0; c < T; ++c) {
                const TagInfo& prev = info[p];
                const TagInfo& cur = info[c];
                bool ok;
                if (iobes) {
                    bool prev_open = prev.prefix == 'B' || prev.prefix == 'I';
                    if (prev_open)
                        ok = (cur.prefix == 'I' || cur.prefix == 'E') && cur.type == prev.type;
                    else
                        ok = cur.prefix == 0 || cur.prefix == 'B' || cur.prefix == 'S';
                } else { // BIO: I-X only continues a same-type B-X/I-X
                    if (cur.prefix == 'I')
                        ok = (prev.prefix == 'B' || prev.prefix == 'I') && prev.type == cur.type;
                    else
                        ok = true;
                    (void)outside;
                }
                pair[p * T + c] = ok;
            }
        }
    }
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::string> decode(const TaggerModel& m, const std::vector<std::string>& words,
                                bool constrain) {
    size_t T = m.tags.size();
    size_t N = words.size();
    if (T == 0) throw DomainError("tagger model has no tags");
    if (N == 0) return {};
    SchemeRules rules(m.tags, m.scheme, constrain);

    // emission scores: sum of feature weights per tag
    std::vector<double> emit(N * T, 0.0);
    for (size_t i = 0; i < N; ++i) {
        for (const auto& f : token_features(words, i)) {
            auto it = m.emission.find(f);
            if (it == m.emission.end()) continue;
            const auto& w = it->second;
            for (size_t j = 0; j < T; ++j) emit[i * T + j] += w[j];
        }
    }

    std::vector<double> delta(N * T, kNegInf);
    std::vector<int> back(N * T, -1);
    for (size_t j = 0; j < T; ++j)
        if (rules.start[j]) delta[j] = emit[j];
    for (size_t i = 1; i < N; ++i) {
        for (size_t j = 0; j < T; ++j) {
            double best = kNegInf;
            int arg = -1;
            for (size_t p = 0; p < T; ++p) {
                if (delta[(i - 1) * T + p] == kNegInf || !rules.pair[p * T + j]) continue;
                double cand = delta[(i - 1) * T + p] + m.trans(int(p), int(j));
                if (cand > best) { // strict: ties keep the lowest prev id
                    best = cand;
                    arg = int(p);
                }
            }
            if (arg >= 0) {
                delta[i * T + j] = best + emit[i * T + j];
                back[i * T + j] = arg;
            }
        }
    }
    double best = kNegInf;
    int arg = -1;
    for (size_t j = 0; j < T; ++j) {
        if (delta[(N - 1) * T + j] == kNegInf || !rules.end[j]) continue;
        if (delta[(N - 1) * T + j] > best) {
            best = delta[(N - 1) * T + j];
            arg = int(j);
        }
    }
    if (arg < 0) throw DomainError("no admissible tag path"); // unreachable when "O" exists
    std::vector<std::string> out(N);
    for (size_t i = N; i-- > 0;) {
        out[i] = m.tags[size_t(arg)];
        arg = back[i * T + size_t(arg)];
    }
    return out;
}

} // namespace

std::vector<std::string> viterbi_decode(const TaggerModel& m, const std::vector<std::string>& words,
                                        bool constrain_scheme) {
    return decode(m, words, constrain_scheme);
}

std::vector<std::string> predict(const TaggerModel& m, const std::vector<std::string>& words) {
    return decode(m, words, false);
}

TaggerModel train_tagger(const Corpus& corpus, int epochs, uint64_t seed) {
    if (corpus.sentences.empty()) throw DomainError("cannot train on an empty corpus");
    if (epochs < 1) throw DomainError("epochs must be positive");

    std::set<std::string> tagset;
    for (const auto& s : corpus.sentences)
        for (const auto& t : s.tokens) tagset.insert(t.tag);
    TaggerModel model;
    model.scheme = corpus.scheme;
    model.tags.assign(tagset.begin(), tagset.end());
    size_t T = model.tags.size();

    // features and gold tag ids, precomputed per sentence
    std::vector<std::vector<std::vector<std::string>>> feats(corpus.sentences.size());
    std::vector<std::vector<int>> gold_ids(corpus.sentences.size());
    for (size_t si = 0; si < corpus.sentences.size(); ++si) {
        auto words = corpus.sentences[si].words();
        feats[si].reserve(words.size());
        for (size_t i = 0; i < words.size(); ++i) feats[si].push_back(token_features(words, i));
        for (const auto& t : corpus.sentences[si].tokens)
            gold_ids[si].push_back(model.tag_id(t.tag));
    }

    std::unordered_map<std::string, AveragedWeights> emission;
    AveragedWeights transition(T * T);
    auto emission_row = [&](const std::string& f) -> AveragedWeights& {
        auto it = emission.find(f);
        if (it == emission.end()) it = emission.emplace(f, AveragedWeights(T)).first;
        return it->second;
    };

    // lightweight view over current weights so decode() can be reused
    TaggerModel work;
    work.scheme = corpus.scheme;
    work.tags = model.tags;
    work.transition.assign(T * T, 0.0);

    Rng rng(seed);
    std::vector<size_t> order(corpus.sentences.size());
    std::iota(order.begin(), order.end(), size_t(0));
    uint64_t now = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t si : order) {
            ++now;
            const auto& sent = corpus.sentences[si];
            auto words = sent.words();
            // refreshing the view: emissions are pulled lazily below;
            // transitions are dense and cheap to copy
            work.transition.assign(transition.current.begin(), transition.current.end());
            work.emission.clear();
            for (const auto& fs : feats[si])
                for (const auto& f : fs) {
                    auto it = emission.find(f);
                    if (it != emission.end()) work.emission[f] = it->second.current;
                }
            auto predicted = decode(work, words, false);
            bool mismatch = false;
            for (size_t i = 0; i < words.size(); ++i) {
                int pj = model.tag_id(predicted[i]);
                int gj = gold_ids[si][i];
                if (pj == gj) continue;
                mismatch = true;
                for (const auto& f : feats[si][i]) {
                    auto& row = emission_row(f);
                    row.add(size_t(gj), 1.0, now);
                    row.add(size_t(pj), -1.0, now);
                }
            }
            if (mismatch) {
                for (size_t i = 1; i < words.size(); ++i) {
                    int gp = gold_ids[si][i - 1], gc = gold_ids[si][i];
                    int pp = model.tag_id(predicted[i - 1]), pc = model.tag_id(predicted[i]);
                    if (gp == pp && gc == pc) continue;
                    transition.add(size_t(gp) * T + size_t(gc), 1.0, now);
                    transition.add(size_t(pp) * T + size_t(pc), -1.0, now);
                }
            }
        }
    }

    model.transition = transition.finalize(now);
    for (const auto& [f, w] : emission) {
        auto avg = w.finalize(now);
        bool all_zero = std::all_of(avg.begin(), avg.end(), [](double v) { return v == 0.0; });
        if (!all_zero) model.emission.emplace(f, std::move(avg));
    }
    return model;
}

Corpus tag_corpus(const TaggerModel& m, const std::vector<std::vector<std::string>>& sentences) {
    Corpus out;
    out.scheme = m.scheme;
    for (const auto& t : m.tags)
        if (t != "O") out.tagset.insert(t);
    out.sentences.reserve(sentences.size());
    for (const auto& words : sentences) {
        if (words.empty()) throw DomainError("cannot tag an empty sentence");
        auto tags = decode(m, words, true);
        TaggedSentence s;
        s.tokens.reserve(words.size());
        for (size_t i = 0; i < words.size(); ++i) s.tokens.push_back({words[i], tags[i]});
        out.sentences.push_back(std::move(s));
    }
    return out;
}

namespace {

std::string fmt_weight(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void save_tagger(std::ostream& out, const TaggerModel& m) {
    out << "taggermodel 1\n";
    out << "scheme " << scheme_name(m.scheme) << '\n';
    out << "tags " << m.tags.size() << '\n';
    for (const auto& t : m.tags) out << t << '\n';
    out << "transitions\n";
    size_t T = m.tags.size();
    for (size_t p = 0; p < T; ++p) {
        for (size_t c = 0; c < T; ++c) {
            if (c) out << ' ';
            out << fmt_weight(m.transition[p * T + c]);
        }
        out << '\n';
    }
    std::vector<std::string> keys;
    keys.reserve(m.emission.size());
    for (const auto& [f, w] : m.emission) keys.push_back(f);
    std::sort(keys.begin(), keys.end());
    out << "emissions " << keys.size() << '\n';
    for (const auto& f : keys) {
        out << f << '\t';
        const auto& w = m.emission.at(f);
        for (size_t j = 0; j < w.size(); ++j) {
            if (j) out << ' ';
            out << fmt_weight(w[j]);
        }
        out << '\n';
    }
}

TaggerModel load_tagger(std::istream& in) {
    std::string line, word;
    if (!std::getline(in, line) || line != "taggermodel 1")
        throw FormatError("not a tagger model file");
    TaggerModel m;
    std::string scheme;
    if (!(in >> word >> scheme) || word != "scheme") throw FormatError("bad tagger model header");
    m.scheme = scheme_from_name(scheme);
    size_t T = 0;
    if (!(in >> word >> T) || word != "tags") throw FormatError("bad tagger model header");
    m.tags.resize(T);
    for (auto& t : m.tags)
        if (!(in >> t)) throw FormatError("truncated tag list");
    if (!(in >> word) || word != "transitions") throw FormatError("bad tagger model");
    m.transition.resize(T * T);
    for (auto& v : m.transition)
        if (!(in >> v)) throw FormatError("truncated transition table");
    size_t count = 0;
    if (!(in >> word >> count) || word != "emissions") throw FormatError("bad tagger model");
    std::getline(in, line); // consume end of line
    for (size_t k = 0; k < count; ++k) {
        if (!std::getline(in, line)) throw FormatError("truncated emission table");
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError("bad emission line");
        std::string f = line.substr(0, tab);
        std::istringstream ws(line.substr(tab + 1));
        std::vector<double> w(T);
        for (auto& v : w)
            if (!(ws >> v)) throw FormatError("bad emission weights for " + f);
        m.emission.emplace(std::move(f), std::move(w));
    }
    return m;
}

EvalReport evaluate(const Corpus& gold, const Corpus& pred, EvalMode mode) {
    if (gold.sentences.size() != pred.sentences.size())
        throw DomainError("corpora differ in sentence count");
    for (size_t i = 0; i < gold.sentences.size(); ++i)
        if (gold.sentences[i].tokens.size() != pred.sentences[i].tokens.size())
            throw DomainError("sentence " + std::to_string(i) + " differs in length");

    EvalReport r;
    r.mode = mode;
    for (size_t i = 0; i < gold.sentences.size(); ++i) {
        const auto& gs = gold.sentences[i];
        const auto& ps = pred.sentences[i];
        r.tokens += gs.tokens.size();
        for (size_t k = 0; k < gs.tokens.size(); ++k)
            if (gs.tokens[k].tag == ps.tokens[k].tag) ++r.correct_tokens;
        if (mode == EvalMode::Span) {
            auto g = extract_spans(gs, gold.scheme);
            auto p = extract_spans(ps, pred.scheme);
            std::set<Span> gset(g.begin(), g.end());
            r.gold_spans += g.size();
            r.pred_spans += p.size();
            for (const auto& sp : p) r.matched_spans += gset.count(sp);
        }
    }
    r.accuracy = r.tokens ? double(r.correct_tokens) / double(r.tokens) : 0.0;
    if (mode == EvalMode::Span) {
        r.precision = r.pred_spans ? double(r.matched_spans) / double(r.pred_spans) : 0.0;
        r.recall = r.gold_spans ? double(r.matched_spans) / double(r.gold_spans) : 0.0;
        r.f1 = (r.precision + r.recall) > 0
                   ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                   : 0.0;
    }
    return r;
}

void write_eval_report(std::ostream& out, const EvalReport& r) {
    out << "mode=" << (r.mode == EvalMode::Span ? "span" : "token") << '\n';
    out << "precision=" << fmt_weight(r.precision) << '\n';
    out << "recall=" << fmt_weight(r.recall) << '\n';
    out << "f1=" << fmt_weight(r.f1) << '\n';
    out << "accuracy=" << fmt_weight(r.accuracy) << '\n';
    out << "gold_spans=" << r.gold_spans << '\n';
    out << "pred_spans=" << r.pred_spans << '\n';
    out << "matched_spans=" << r.matched_spans << '\n';
    out << "tokens=" << r.tokens << '\n';
    out << "correct_tokens=" << r.correct_tokens << '\n';
}

std::string eval_report_tsv(const EvalReport& r) {
    std::ostringstream o;
    o << (r.mode == EvalMode::Span ? "span" : "token") << '\t' << fmt_weight(r.precision) << '\t'
      << fmt_weight(r.recall) << '\t' << fmt_weight(r.f1) << '\t' << fmt_weight(r.accuracy) << '\t'
      << r.gold_spans << '\t' << r.pred_spans << '\t' << r.matched_spans << '\t' << r.tokens << '\t'
      << r.correct_tokens;
    return o.str();
}

} // namespace tagaug
