#include "tagaug/cli.hpp"

#include "tagaug/analysis.hpp"
#include "tagaug/annotate.hpp"
#include "tagaug/clean.hpp"
#include "tagaug/generate.hpp"
#include "tagaug/linearize.hpp"
#include "tagaug/recipes.hpp"
#include "tagaug/rng.hpp"
#include "tagaug/rnnlm.hpp"
#include "tagaug/tagger.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tagaug {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    out << bytes;
    out.flush();
    if (!out) throw DomainError("short write to " + path);
}

std::string hex64(uint64_t v) {
    char b[17];
    std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
    return b;
}

// shortest round-trippable decimal
std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

Corpus load_conll(const std::string& path, std::optional<TagScheme> scheme = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_conll(in, scheme);
}

std::vector<LinearizedSequence> load_lin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_linearized(in);
}

std::vector<std::vector<std::string>> load_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_unlabeled_text(in);
}

// the argv= line holds the command plus every flag with its resolved
// value, so a manifest re-run never depends on compiled-in defaults
struct Argv {
    std::vector<std::string> v;

    explicit Argv(const std::string& cmd) { v.push_back(cmd); }
    Argv& opt(const std::string& flag, const std::string& val) {
        v.push_back(flag);
        v.push_back(val);
        return *this;
    }
    Argv& opt(const std::string& flag, uint64_t val) { return opt(flag, std::to_string(val)); }
    Argv& opt(const std::string& flag, int val) { return opt(flag, std::to_string(val)); }
    Argv& opt(const std::string& flag, double val) { return opt(flag, g17(val)); }
    // emitted only when non-empty (paths and such with no default)
    Argv& opt_if(const std::string& flag, const std::string& val) {
        if (!val.empty()) opt(flag, val);
        return *this;
    }
    Argv& flag_if(const std::string& flag, bool on) {
        if (on) v.push_back(flag);
        return *this;
    }
    // a true/false pair like --drop-o / --keep-o: exactly one is recorded
    Argv& toggle(const std::string& on_flag, const std::string& off_flag, bool on) {
        v.push_back(on ? on_flag : off_flag);
        return *this;
    }
};

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    std::vector<std::pair<std::string, std::string>> rows;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void field(const std::string& k, const std::string& v) { rows.emplace_back(k, v); }
    void field(const std::string& k, uint64_t v) { field(k, std::to_string(v)); }
    void input(const std::string& label, const std::string& path) {
        field("input." + label, path);
        field("input_digest." + label, hex64(fnv1a64(slurp(path))));
    }
    void output(const std::string& label, const std::string& path) {
        field("output." + label, path);
        field("output_digest." + label, hex64(fnv1a64(slurp(path))));
    }
    void save(const std::string& path) const {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
        std::ostringstream ss;
        ss << "command=" << command << '\n' << "argv=";
        for (size_t i = 0; i < argv.size(); ++i) ss << (i ? "\t" : "") << argv[i];
        ss << '\n';
        for (const auto& [k, v] : rows) ss << k << '=' << v << '\n';
        ss << "wall_ms=" << ms << '\n';
        spit(path, ss.str());
    }
};

std::set<std::string> split_csv(const std::string& csv) {
    std::set<std::string> out;
    std::string item;
    std::istringstream ss(csv);
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

std::set<std::string> gather_tagset(const std::string& tags_from, const std::string& tags_csv) {
    std::set<std::string> tagset;
    if (!tags_from.empty()) {
        Corpus c = load_conll(tags_from);
        tagset.insert(c.tagset.begin(), c.tagset.end());
    }
    for (const auto& t : split_csv(tags_csv)) tagset.insert(t);
    return tagset;
}

std::set<std::string> labels_of(const std::vector<TaggedSentence>& sentences) {
    std::set<std::string> out;
    for (const auto& s : sentences)
        for (const auto& t : s.tokens)
            if (t.tag != "O") out.insert(t.tag);
    return out;
}

void write_corpus_file(const std::string& path, const Corpus& c) {
    std::ostringstream ss;
    write_conll(ss, c);
    spit(path, ss.str());
}

void write_lin_file(const std::string& path, const std::vector<LinearizedSequence>& seqs) {
    std::ostringstream ss;
    write_linearized(ss, seqs);
    spit(path, ss.str());
}

int parse_max_len(const std::string& s, int auto_value) {
    if (s == "auto") return std::max(1, auto_value);
    int v = std::stoi(s);
    if (v < 1) throw DomainError("--max-len must be positive");
    return v;
}

// ---------------------------------------------------------------- commands

struct LinearizeOpts {
    std::string in, out, order = "tag-word", scheme, condition;
    bool drop_o = true;
};

int cmd_linearize(const LinearizeOpts& o, int threads) {
    Manifest m;
    m.command = "linearize";
    std::optional<TagScheme> scheme;
    if (!o.scheme.empty()) scheme = scheme_from_name(o.scheme);
    Corpus c = load_conll(o.in, scheme);

    LinearizeConfig cfg;
    cfg.order = order_from_name(o.order);
    cfg.drop_o = o.drop_o;
    if (!o.condition.empty()) cfg.condition = o.condition;
    auto seqs = linearize_corpus(c, cfg);
    write_lin_file(o.out, seqs);

    m.argv = Argv("linearize")
                 .opt("--in", o.in)
                 .opt("--out", o.out)
                 .opt("--order", o.order)
                 .toggle("--drop-o", "--keep-o", o.drop_o)
                 .opt_if("--scheme", o.scheme)
                 .opt_if("--condition", o.condition)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("corpus", o.in);
    m.output("linearized", o.out);
    m.field("sentences", seqs.size());
    m.save(o.out + ".manifest");
    return 0;
}

struct TrainLmOpts {
    std::string train, dev, tags_from, tags, out, log;
    double dev_fraction = 0.1, lr0 = 1.0, lr_decay = 0.5, dropout = 0.5, grad_clip = 5.0;
    int batch = 32, max_epochs = 30, patience = 3, emb_dim = 300, hidden_dim = 512, min_count = 2;
    uint64_t seed = 1;
};

int cmd_train_lm(const TrainLmOpts& o, int threads) {
    Manifest m;
    m.command = "train-lm";
    auto all = load_lin(o.train);

    std::vector<LinearizedSequence> train_part, dev_part;
    if (!o.dev.empty()) {
        train_part = all;
        dev_part = load_lin(o.dev);
    } else {
        // hold out a seeded slice of the training file
        if (all.size() < 2) throw DomainError("need at least 2 sequences to split off a dev set");
        if (o.dev_fraction <= 0 || o.dev_fraction >= 1)
            throw DomainError("--dev-fraction must be in (0, 1)");
        size_t k = size_t(std::lround(o.dev_fraction * double(all.size())));
        k = std::min(std::max<size_t>(k, 1), all.size() - 1);
        std::vector<size_t> idx(all.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(derive_seed(o.seed, "dev-split"));
        rng.shuffle(idx);
        std::vector<bool> is_dev(all.size(), false);
        for (size_t i = 0; i < k; ++i) is_dev[idx[i]] = true;
        for (size_t i = 0; i < all.size(); ++i)
            (is_dev[i] ? dev_part : train_part).push_back(all[i]);
    }

    auto keep = gather_tagset(o.tags_from, o.tags);
    Vocabulary vocab = Vocabulary::build(train_part, keep, o.min_count);

    TrainConfig tc;
    tc.lr0 = o.lr0;
    tc.batch_size = o.batch;
    tc.lr_decay = o.lr_decay;
    tc.max_epochs = o.max_epochs;
    tc.patience = o.patience;
    tc.dropout = o.dropout;
    tc.grad_clip = o.grad_clip;
    tc.seed = o.seed;
    tc.emb_dim = o.emb_dim;
    tc.hidden_dim = o.hidden_dim;

    std::vector<EpochStats> log;
    LMCheckpoint ckpt = train_lm(train_part, dev_part, vocab, tc, &log);

    {
        std::ostringstream ss;
        save_checkpoint(ss, ckpt);
        spit(o.out, ss.str());
    }
    std::string log_path = o.log.empty() ? o.out + ".log" : o.log;
    {
        std::ostringstream ss;
        for (const auto& e : log)
            ss << "epoch=" << e.epoch << " lr=" << g17(e.lr) << " train_nll=" << g17(e.train_nll)
               << " dev_ppl=" << g17(e.dev_perplexity) << " improved=" << (e.improved ? 1 : 0)
               << '\n';
        spit(log_path, ss.str());
    }

    m.argv = Argv("train-lm")
                 .opt("--train", o.train)
                 .opt_if("--dev", o.dev)
                 .opt("--dev-fraction", o.dev_fraction)
                 .opt_if("--tags-from", o.tags_from)
                 .opt_if("--tags", o.tags)
                 .opt("--out", o.out)
                 .opt("--log", log_path)
                 .opt("--emb-dim", o.emb_dim)
                 .opt("--hidden-dim", o.hidden_dim)
                 .opt("--lr0", o.lr0)
                 .opt("--lr-decay", o.lr_decay)
                 .opt("--batch", o.batch)
                 .opt("--max-epochs", o.max_epochs)
                 .opt("--patience", o.patience)
                 .opt("--dropout", o.dropout)
                 .opt("--grad-clip", o.grad_clip)
                 .opt("--min-count", o.min_count)
                 .opt("--seed", o.seed)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.field("seed", o.seed);
    m.input("train", o.train);
    if (!o.dev.empty()) m.input("dev", o.dev);
    if (!o.tags_from.empty()) m.input("tags_from", o.tags_from);
    m.output("checkpoint", o.out);
    m.output("log", log_path);
    m.field("train_sequences", train_part.size());
    m.field("dev_sequences", dev_part.size());
    m.field("vocab_size", uint64_t(vocab.size()));
    m.field("epochs_run", log.size());
    m.field("best_dev_perplexity", g17(ckpt.dev_perplexity));
    m.field("avg_train_len", uint64_t(ckpt.avg_train_len));
    m.save(o.out + ".manifest");
    return 0;
}

struct GenerateOpts {
    std::string ckpt, out, report, max_len = "auto", condition;
    double temperature = 1.0, stop = 0.99;
    int batch = 1000, max_batches = 100;
    uint64_t seed = 1;
    bool occurrence_weighted = false;
};

int cmd_generate(const GenerateOpts& o, int threads) {
    Manifest m;
    m.command = "generate";
    LMCheckpoint ckpt;
    {
        std::ifstream in(o.ckpt, std::ios::binary);
        if (!in) throw ParseError("cannot open " + o.ckpt);
        ckpt = load_checkpoint(in);
    }

    GenConfig cfg;
    cfg.max_len = parse_max_len(o.max_len, ckpt.avg_train_len);
    cfg.temperature = o.temperature;
    cfg.batch_size = o.batch;
    cfg.saturation_threshold = o.stop;
    cfg.max_batches = o.max_batches;
    if (!o.condition.empty()) cfg.condition = o.condition;
    cfg.seed = o.seed;
    cfg.occurrence_weighted = o.occurrence_weighted;
    cfg.threads = threads;

    auto [seqs, rep] = generate_until_saturated(ckpt, cfg);
    write_lin_file(o.out, seqs);

    std::string report_path = o.report.empty() ? o.out + ".report" : o.report;
    {
        std::ostringstream ss;
        ss << "batches=" << rep.batches << '\n'
           << "sequences=" << rep.sequences << '\n'
           << "saturated=" << (rep.saturated ? 1 : 0) << '\n'
           << "distinct_types=" << rep.distinct_types << '\n'
           << "final_ratio=" << (rep.ratios.empty() ? "0" : g17(rep.ratios.back())) << '\n'
           << "ratios=";
        for (size_t i = 0; i < rep.ratios.size(); ++i) ss << (i ? "," : "") << g17(rep.ratios[i]);
        ss << '\n';
        spit(report_path, ss.str());
    }

    m.argv = Argv("generate")
                 .opt("--ckpt", o.ckpt)
                 .opt("--out", o.out)
                 .opt("--report", report_path)
                 .opt("--max-len", o.max_len)
                 .opt("--temperature", o.temperature)
                 .opt("--batch", o.batch)
                 .opt("--stop", o.stop)
                 .opt("--max-batches", o.max_batches)
                 .opt_if("--condition", o.condition)
                 .opt("--seed", o.seed)
                 .flag_if("--occurrence-weighted", o.occurrence_weighted)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.field("seed", o.seed);
    m.input("checkpoint", o.ckpt);
    m.output("synthetic", o.out);
    m.output("report", report_path);
    m.field("sequences", rep.sequences);
    m.field("saturated", uint64_t(rep.saturated ? 1 : 0));
    m.save(o.out + ".manifest");
    return 0;
}

struct CleanOpts {
    std::string in, out, report, order = "tag-word", scheme, tags_from, tags, dedup_gold;
    bool drop_o = true;
};

int cmd_clean(const CleanOpts& o, int threads) {
    Manifest m;
    m.command = "clean";
    auto seqs = load_lin(o.in);
    TagScheme scheme = scheme_from_name(o.scheme);
    auto tagset = gather_tagset(o.tags_from, o.tags);
    if (tagset.empty()) throw DomainError("cleaning needs a tagset (--tags-from or --tags)");

    std::optional<Corpus> gold;
    if (!o.dedup_gold.empty()) gold = load_conll(o.dedup_gold);

    LinearizeConfig cfg;
    cfg.order = order_from_name(o.order);
    cfg.drop_o = o.drop_o;
    auto [kept, rep] = clean(seqs, cfg, scheme, tagset, gold ? &*gold : nullptr);

    Corpus out;
    out.scheme = scheme;
    out.sentences = kept;
    out.tagset = labels_of(kept);
    write_corpus_file(o.out, out);

    std::string report_path = o.report.empty() ? o.out + ".report" : o.report;
    {
        std::ostringstream ss;
        write_clean_report(ss, rep);
        spit(report_path, ss.str());
    }

    m.argv = Argv("clean")
                 .opt("--in", o.in)
                 .opt("--out", o.out)
                 .opt("--report", report_path)
                 .opt("--order", o.order)
                 .toggle("--drop-o", "--keep-o", o.drop_o)
                 .opt("--scheme", o.scheme)
                 .opt_if("--tags-from", o.tags_from)
                 .opt_if("--tags", o.tags)
                 .opt_if("--dedup-gold", o.dedup_gold)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("synthetic", o.in);
    if (!o.tags_from.empty()) m.input("tags_from", o.tags_from);
    if (!o.dedup_gold.empty()) m.input("gold", o.dedup_gold);
    m.output("cleaned", o.out);
    m.output("report", report_path);
    m.field("input_sequences", rep.input_count());
    m.field("kept", rep.kept);
    for (const auto& [bucket, n] : rep.rejected) m.field("rejected_" + bucket, n);
    m.save(o.out + ".manifest");
    return 0;
}

struct BuildKbOpts {
    std::string in, out;
    int min_freq = 2;
};

int cmd_build_kb(const BuildKbOpts& o, int threads) {
    Manifest m;
    m.command = "build-kb";
    Corpus c = load_conll(o.in);
    KnowledgeBase kb = build_kb(c, o.min_freq);
    {
        std::ostringstream ss;
        write_kb_tsv(ss, kb);
        spit(o.out, ss.str());
    }
    m.argv = Argv("build-kb")
                 .opt("--in", o.in)
                 .opt("--out", o.out)
                 .opt("--min-freq", o.min_freq)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("corpus", o.in);
    m.output("kb", o.out);
    m.field("entries", kb.size());
    m.save(o.out + ".manifest");
    return 0;
}

struct AnnotateKbOpts {
    std::string kb, text, out;
};

int cmd_annotate_kb(const AnnotateKbOpts& o, int threads) {
    Manifest m;
    m.command = "annotate-kb";
    KnowledgeBase kb;
    {
        std::ifstream in(o.kb, std::ios::binary);
        if (!in) throw ParseError("cannot open " + o.kb);
        kb = read_kb_tsv(in);
    }
    auto sentences = load_raw(o.text);
    Corpus annotated = kb_annotate_corpus(sentences, kb);
    write_corpus_file(o.out, annotated);

    m.argv = Argv("annotate-kb")
                 .opt("--kb", o.kb)
                 .opt("--text", o.text)
                 .opt("--out", o.out)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("kb", o.kb);
    m.input("text", o.text);
    m.output("annotated", o.out);
    m.field("sentences", annotated.sentences.size());
    m.save(o.out + ".manifest");
    return 0;
}

struct WeakTagOpts {
    std::string model, text, out;
};

int cmd_weak_tag(const WeakTagOpts& o, int threads) {
    Manifest m;
    m.command = "weak-tag";
    TaggerModel model;
    {
        std::ifstream in(o.model, std::ios::binary);
        if (!in) throw ParseError("cannot open " + o.model);
        model = load_tagger(in);
    }
    auto sentences = load_raw(o.text);
    Corpus tagged = weak_tag(sentences, model);
    write_corpus_file(o.out, tagged);

    m.argv = Argv("weak-tag")
                 .opt("--model", o.model)
                 .opt("--text", o.text)
                 .opt("--out", o.out)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("model", o.model);
    m.input("text", o.text);
    m.output("tagged", o.out);
    m.field("sentences", tagged.sentences.size());
    m.save(o.out + ".manifest");
    return 0;
}

struct AssembleOpts {
    std::string gold, synthetic, recipe, out;
    int oversample = 4;
    uint64_t cap = 20000, seed = 1;
};

int cmd_assemble(const AssembleOpts& o, int threads) {
    Manifest m;
    m.command = "assemble";
    Corpus gold = load_conll(o.gold);
    Corpus synthetic;
    synthetic.scheme = gold.scheme;
    if (!o.synthetic.empty()) synthetic = load_conll(o.synthetic, gold.scheme);

    AssemblePlan plan;
    plan.recipe = recipe_from_name(o.recipe);
    plan.gold_oversample = o.oversample;
    plan.synthetic_cap = size_t(o.cap);
    plan.seed = o.seed;
    Corpus training = assemble_training_set(gold, synthetic, plan);
    write_corpus_file(o.out, training);

    m.argv = Argv("assemble")
                 .opt("--gold", o.gold)
                 .opt_if("--synthetic", o.synthetic)
                 .opt("--recipe", o.recipe)
                 .opt("--oversample", o.oversample)
                 .opt("--cap", o.cap)
                 .opt("--seed", o.seed)
                 .opt("--out", o.out)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.field("seed", o.seed);
    m.input("gold", o.gold);
    if (!o.synthetic.empty()) m.input("synthetic", o.synthetic);
    m.output("training_set", o.out);
    m.field("gold_sentences", gold.sentences.size());
    m.field("synthetic_sentences", synthetic.sentences.size());
    m.field("training_sentences", training.sentences.size());
    m.save(o.out + ".manifest");
    return 0;
}

struct TrainTaggerOpts {
    std::string train, out;
    int epochs = 10;
    uint64_t seed = 1;
};

int cmd_train_tagger(const TrainTaggerOpts& o, int threads) {
    Manifest m;
    m.command = "train-tagger";
    Corpus c = load_conll(o.train);
    TaggerModel model = train_tagger(c, o.epochs, o.seed);
    {
        std::ostringstream ss;
        save_tagger(ss, model);
        spit(o.out, ss.str());
    }
    m.argv = Argv("train-tagger")
                 .opt("--train", o.train)
                 .opt("--out", o.out)
                 .opt("--epochs", o.epochs)
                 .opt("--seed", o.seed)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.field("seed", o.seed);
    m.input("train", o.train);
    m.output("model", o.out);
    m.field("sentences", c.sentences.size());
    m.field("tags", model.tags.size());
    m.save(o.out + ".manifest");
    return 0;
}

struct EvaluateOpts {
    std::string gold, pred, mode = "span", out;
};

int cmd_evaluate(const EvaluateOpts& o, int threads) {
    Manifest m;
    m.command = "evaluate";
    Corpus gold = load_conll(o.gold);
    Corpus pred = load_conll(o.pred, gold.scheme);
    EvalMode mode = o.mode == "token" ? EvalMode::Token : EvalMode::Span;
    EvalReport rep = evaluate(gold, pred, mode);

    std::ostringstream ss;
    write_eval_report(ss, rep);
    std::cout << ss.str();
    if (o.out.empty()) return 0;

    spit(o.out, ss.str());
    m.argv = Argv("evaluate")
                 .opt("--gold", o.gold)
                 .opt("--pred", o.pred)
                 .opt("--mode", o.mode)
                 .opt("--out", o.out)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("gold", o.gold);
    m.input("pred", o.pred);
    m.output("report", o.out);
    m.field("f1", g17(rep.f1));
    m.save(o.out + ".manifest");
    return 0;
}

struct DiversityOpts {
    std::string gold, generated, out;
    bool type_insensitive = false;
};

int cmd_diversity(const DiversityOpts& o, int threads) {
    Manifest m;
    m.command = "diversity";
    Corpus gold = load_conll(o.gold);
    Corpus generated = load_conll(o.generated);
    DiversityReport rep = diversity_report(gold, generated, !o.type_insensitive);

    std::ostringstream ss;
    write_diversity_report(ss, rep);
    std::cout << ss.str();
    if (o.out.empty()) return 0;

    spit(o.out, ss.str());
    m.argv = Argv("diversity")
                 .opt("--gold", o.gold)
                 .opt("--generated", o.generated)
                 .flag_if("--type-insensitive", o.type_insensitive)
                 .opt("--out", o.out)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.input("gold", o.gold);
    m.input("generated", o.generated);
    m.output("report", o.out);
    m.save(o.out + ".manifest");
    return 0;
}

// ---------------------------------------------------------------- pipeline

struct PipelineOpts {
    std::string recipe, gold, test, dev, unlabeled, kb, workdir;
    std::string order = "tag-word", max_len = "auto";
    bool drop_o = true;
    uint64_t seed = 1;
    // lm
    int emb_dim = 300, hidden_dim = 512, lm_batch = 32, max_epochs = 30, patience = 3,
        min_count = 2;
    double lr0 = 1.0, lr_decay = 0.5, dropout = 0.5, grad_clip = 5.0, dev_fraction = 0.1;
    // generation
    double temperature = 1.0, stop = 0.99;
    int gen_batch = 1000, max_batches = 100;
    // downstream
    int tagger_epochs = 10, oversample = 4, kb_min_freq = 2;
    uint64_t cap = 20000, rd_target = 0;
    double deletion_p = 0.05;
};

int cmd_pipeline(const PipelineOpts& o, int threads) {
    Manifest m;
    m.command = "pipeline";
    namespace fs = std::filesystem;
    fs::create_directories(o.workdir);
    auto wd = [&](const std::string& f) { return (fs::path(o.workdir) / f).string(); };
    // a stale success marker from an earlier run must not survive a failure
    fs::remove(wd("pipeline.manifest"));

    Recipe recipe = recipe_from_name(o.recipe);
    bool gen_family = recipe == Recipe::Gen || recipe == Recipe::GenUd || recipe == Recipe::GenKb;
    bool needs_unlabeled = recipe == Recipe::Wt || recipe == Recipe::Kb ||
                           recipe == Recipe::GenUd || recipe == Recipe::GenKb;
    if (needs_unlabeled && o.unlabeled.empty())
        throw DomainError("recipe " + o.recipe + " needs --unlabeled");

    auto stage = [&](std::vector<std::string> argv) {
        std::cout << "[pipeline]";
        for (const auto& a : argv) std::cout << ' ' << a;
        std::cout << '\n';
        if (run_cli(argv) != 0) throw DomainError("pipeline stage '" + argv[0] + "' failed");
    };
    auto seed_for = [&](const char* name) { return derive_seed(o.seed, name); };

    Corpus gold = load_conll(o.gold);
    std::string scheme = scheme_name(gold.scheme);
    std::string eval_mode = gold.scheme == TagScheme::TOKEN ? "token" : "span";

    // artifact chain, in production order; labels reused in the manifest
    std::vector<std::pair<std::string, std::string>> artifacts;
    auto produced = [&](const std::string& label, const std::string& path) {
        artifacts.emplace_back(label, path);
    };

    std::string synthetic_conll; // CoNLL synthetic block fed to assembly

    if (recipe == Recipe::Rd || recipe == Recipe::RdStar) {
        size_t target = o.rd_target ? size_t(o.rd_target)
                        : recipe == Recipe::Rd ? size_t(o.oversample) * gold.sentences.size()
                                               : gold.sentences.size();
        Corpus synthetic =
            deletion_passes(gold, o.deletion_p, /*entity_aware=*/true, seed_for("rd"), target);
        synthetic_conll = wd("synthetic.conll");
        write_corpus_file(synthetic_conll, synthetic);
        std::cout << "[pipeline] deletion passes: " << synthetic.sentences.size()
                  << " synthetic sentences\n";
        produced("synthetic", synthetic_conll);
    } else if (recipe == Recipe::Wt) {
        stage(Argv("train-tagger")
                  .opt("--train", o.gold)
                  .opt("--out", wd("weak_tagger.model"))
                  .opt("--epochs", o.tagger_epochs)
                  .opt("--seed", seed_for("weak"))
                  .opt("--threads", threads)
                  .v);
        produced("weak_tagger", wd("weak_tagger.model"));
        stage(Argv("weak-tag")
                  .opt("--model", wd("weak_tagger.model"))
                  .opt("--text", o.unlabeled)
                  .opt("--out", wd("weak.conll"))
                  .opt("--threads", threads)
                  .v);
        synthetic_conll = wd("weak.conll");
        produced("synthetic", synthetic_conll);
    } else if (recipe == Recipe::Kb) {
        std::string kb_path = o.kb;
        if (kb_path.empty()) {
            kb_path = wd("kb.tsv");
            stage(Argv("build-kb")
                      .opt("--in", o.gold)
                      .opt("--out", kb_path)
                      .opt("--min-freq", o.kb_min_freq)
                      .opt("--threads", threads)
                      .v);
            produced("kb", kb_path);
        }
        stage(Argv("annotate-kb")
                  .opt("--kb", kb_path)
                  .opt("--text", o.unlabeled)
                  .opt("--out", wd("kbann.conll"))
                  .opt("--threads", threads)
                  .v);
        synthetic_conll = wd("kbann.conll");
        produced("synthetic", synthetic_conll);
    } else if (gen_family) {
        stage(Argv("linearize")
                  .opt("--in", o.gold)
                  .opt("--out", wd("gold.lin"))
                  .opt("--order", o.order)
                  .toggle("--drop-o", "--keep-o", o.drop_o)
                  .opt("--scheme", scheme)
                  .opt("--threads", threads)
                  .v);
        produced("gold_lin", wd("gold.lin"));

        std::string lm_train = wd("gold.lin");
        std::string gen_condition;
        if (recipe == Recipe::GenUd || recipe == Recipe::GenKb) {
            // weakly labeled side, linearized under the same config
            std::string aux_conll, aux_condition;
            if (recipe == Recipe::GenUd) {
                stage(Argv("train-tagger")
                          .opt("--train", o.gold)
                          .opt("--out", wd("weak_tagger.model"))
                          .opt("--epochs", o.tagger_epochs)
                          .opt("--seed", seed_for("weak"))
                          .opt("--threads", threads)
                          .v);
                produced("weak_tagger", wd("weak_tagger.model"));
                stage(Argv("weak-tag")
                          .opt("--model", wd("weak_tagger.model"))
                          .opt("--text", o.unlabeled)
                          .opt("--out", wd("weak.conll"))
                          .opt("--threads", threads)
                          .v);
                aux_conll = wd("weak.conll");
                aux_condition = "[unlabeled]";
            } else {
                std::string kb_path = o.kb;
                if (kb_path.empty()) {
                    kb_path = wd("kb.tsv");
                    stage(Argv("build-kb")
                              .opt("--in", o.gold)
                              .opt("--out", kb_path)
                              .opt("--min-freq", o.kb_min_freq)
                              .opt("--threads", threads)
                              .v);
                    produced("kb", kb_path);
                }
                stage(Argv("annotate-kb")
                          .opt("--kb", kb_path)
                          .opt("--text", o.unlabeled)
                          .opt("--out", wd("kbann.conll"))
                          .opt("--threads", threads)
                          .v);
                aux_conll = wd("kbann.conll");
                aux_condition = "[KB]";
            }
            produced("aux", aux_conll);
            stage(Argv("linearize")
                      .opt("--in", aux_conll)
                      .opt("--out", wd("aux.lin"))
                      .opt("--order", o.order)
                      .toggle("--drop-o", "--keep-o", o.drop_o)
                      .opt("--scheme", scheme)
                      .opt("--threads", threads)
                      .v);
            produced("aux_lin", wd("aux.lin"));

            // gold repeats `oversample` times, then the smaller side tiles up
            auto gold_lin = load_lin(wd("gold.lin"));
            auto aux_lin = load_lin(wd("aux.lin"));
            std::vector<LinearizedSequence> gold_rep;
            for (int i = 0; i < o.oversample; ++i)
                gold_rep.insert(gold_rep.end(), gold_lin.begin(), gold_lin.end());
            auto mix = mix_for_lm(gold_rep, aux_lin, "[labeled]", aux_condition,
                                  /*equalize=*/true, seed_for("mix"));
            write_lin_file(wd("mix.lin"), mix);
            std::cout << "[pipeline] lm mix: " << mix.size() << " sequences\n";
            produced("mix_lin", wd("mix.lin"));
            lm_train = wd("mix.lin");
            gen_condition = "[labeled]";
        }

        {
            Argv a("train-lm");
            a.opt("--train", lm_train);
            if (!o.dev.empty()) {
                stage(Argv("linearize")
                          .opt("--in", o.dev)
                          .opt("--out", wd("dev.lin"))
                          .opt("--order", o.order)
                          .toggle("--drop-o", "--keep-o", o.drop_o)
                          .opt("--scheme", scheme)
                          .opt("--threads", threads)
                          .v);
                produced("dev_lin", wd("dev.lin"));
                a.opt("--dev", wd("dev.lin"));
            } else {
                a.opt("--dev-fraction", o.dev_fraction);
            }
            a.opt("--tags-from", o.gold)
                .opt("--out", wd("lm.daga"))
                .opt("--emb-dim", o.emb_dim)
                .opt("--hidden-dim", o.hidden_dim)
                .opt("--lr0", o.lr0)
                .opt("--lr-decay", o.lr_decay)
                .opt("--batch", o.lm_batch)
                .opt("--max-epochs", o.max_epochs)
                .opt("--patience", o.patience)
                .opt("--dropout", o.dropout)
                .opt("--grad-clip", o.grad_clip)
                .opt("--min-count", o.min_count)
                .opt("--seed", seed_for("lm"))
                .opt("--threads", threads);
            stage(a.v);
        }
        produced("checkpoint", wd("lm.daga"));

        stage(Argv("generate")
                  .opt("--ckpt", wd("lm.daga"))
                  .opt("--out", wd("synthetic.lin"))
                  .opt("--max-len", o.max_len)
                  .opt("--temperature", o.temperature)
                  .opt("--batch", o.gen_batch)
                  .opt("--stop", o.stop)
                  .opt("--max-batches", o.max_batches)
                  .opt_if("--condition", gen_condition)
                  .opt("--seed", seed_for("gen"))
                  .opt("--threads", threads)
                  .v);
        produced("raw_synthetic", wd("synthetic.lin"));

        stage(Argv("clean")
                  .opt("--in", wd("synthetic.lin"))
                  .opt("--out", wd("synthetic.conll"))
                  .opt("--order", o.order)
                  .toggle("--drop-o", "--keep-o", o.drop_o)
                  .opt("--scheme", scheme)
                  .opt("--tags-from", o.gold)
                  .opt("--dedup-gold", o.gold)
                  .opt("--threads", threads)
                  .v);
        synthetic_conll = wd("synthetic.conll");
        produced("cleaned_synthetic", synthetic_conll);
    }

    {
        Argv a("assemble");
        a.opt("--gold", o.gold);
        if (!synthetic_conll.empty()) a.opt("--synthetic", synthetic_conll);
        a.opt("--recipe", o.recipe)
            .opt("--oversample", o.oversample)
            .opt("--cap", o.cap)
            .opt("--seed", seed_for("assemble"))
            .opt("--out", wd("train.conll"))
            .opt("--threads", threads);
        stage(a.v);
    }
    produced("training_set", wd("train.conll"));

    stage(Argv("train-tagger")
              .opt("--train", wd("train.conll"))
              .opt("--out", wd("tagger.model"))
              .opt("--epochs", o.tagger_epochs)
              .opt("--seed", seed_for("tagger"))
              .opt("--threads", threads)
              .v);
    produced("tagger", wd("tagger.model"));

    {
        // tag the test split so span scoring has a prediction file
        TaggerModel model;
        std::ifstream in(wd("tagger.model"), std::ios::binary);
        if (!in) throw ParseError("cannot open " + wd("tagger.model"));
        model = load_tagger(in);
        Corpus test = load_conll(o.test);
        std::vector<std::vector<std::string>> words;
        for (const auto& s : test.sentences) words.push_back(s.words());
        Corpus pred = tag_corpus(model, words);
        write_corpus_file(wd("pred.conll"), pred);
        produced("predictions", wd("pred.conll"));
    }

    stage(Argv("evaluate")
              .opt("--gold", o.test)
              .opt("--pred", wd("pred.conll"))
              .opt("--mode", eval_mode)
              .opt("--out", wd("eval.report"))
              .opt("--threads", threads)
              .v);
    produced("eval_report", wd("eval.report"));

    m.argv = Argv("pipeline")
                 .opt("--recipe", o.recipe)
                 .opt("--gold", o.gold)
                 .opt("--test", o.test)
                 .opt_if("--dev", o.dev)
                 .opt_if("--unlabeled", o.unlabeled)
                 .opt_if("--kb", o.kb)
                 .opt("--workdir", o.workdir)
                 .opt("--order", o.order)
                 .toggle("--drop-o", "--keep-o", o.drop_o)
                 .opt("--seed", o.seed)
                 .opt("--emb-dim", o.emb_dim)
                 .opt("--hidden-dim", o.hidden_dim)
                 .opt("--lr0", o.lr0)
                 .opt("--lr-decay", o.lr_decay)
                 .opt("--lm-batch", o.lm_batch)
                 .opt("--max-epochs", o.max_epochs)
                 .opt("--patience", o.patience)
                 .opt("--dropout", o.dropout)
                 .opt("--grad-clip", o.grad_clip)
                 .opt("--min-count", o.min_count)
                 .opt("--dev-fraction", o.dev_fraction)
                 .opt("--max-len", o.max_len)
                 .opt("--temperature", o.temperature)
                 .opt("--gen-batch", o.gen_batch)
                 .opt("--stop", o.stop)
                 .opt("--max-batches", o.max_batches)
                 .opt("--tagger-epochs", o.tagger_epochs)
                 .opt("--oversample", o.oversample)
                 .opt("--cap", o.cap)
                 .opt("--deletion-p", o.deletion_p)
                 .opt("--rd-target", o.rd_target)
                 .opt("--kb-min-freq", o.kb_min_freq)
                 .opt("--threads", threads)
                 .v;
    m.field("threads", uint64_t(threads));
    m.field("seed", o.seed);
    m.input("gold", o.gold);
    m.input("test", o.test);
    if (!o.dev.empty()) m.input("dev", o.dev);
    if (!o.unlabeled.empty()) m.input("unlabeled", o.unlabeled);
    if (!o.kb.empty()) m.input("kb", o.kb);
    for (const auto& [label, path] : artifacts) m.output(label, path);
    m.save(wd("pipeline.manifest"));
    return 0;
}


std::string trim_ws(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// key=value defaults applied to every option the command line left unset;
// CLI11 2.x only honors set_config on the root app, so the merge is done
// by hand on the parsed subcommand
void apply_config(CLI::App& sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim_ws(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw CLI::ConfigError::Extras(path + " line " + std::to_string(lineno));
        std::string key = trim_ws(t.substr(0, eq));
        std::string value = trim_ws(t.substr(eq + 1));
        if (key == "config") continue;
        auto* opt = sub.get_option_no_throw("--" + key);
        if (!opt) throw CLI::ConfigError::Extras("unknown config key '" + key + "'");
        if (opt->count() > 0) continue; // explicit flags win
        opt->add_result(value);
        opt->run_callback();
    }
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"data augmentation toolkit for sequence tagging"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 1;
    app.add_option("--threads", threads, "worker threads; 1 keeps runs bit-reproducible")
        ->check(CLI::PositiveNumber);
    std::string config_file;

    const std::vector<std::string> orders = {"tag-word", "word-tag"};
    const std::vector<std::string> schemes = {"bio", "iobes", "token"};
    const std::vector<std::string> conditions(kConditionTokens.begin(), kConditionTokens.end());
    const std::vector<std::string> recipes = {"gold", "gen",    "rd", "rd_star",
                                              "wt",   "gen_ud", "kb", "gen_kb"};
    auto max_len_check = CLI::Validator(
        [](std::string& s) -> std::string {
            if (s == "auto") return {};
            try {
                if (std::stoi(s) > 0) return {};
            } catch (...) {
            }
            return std::string("must be 'auto' or a positive integer");
        },
        "LEN");

    LinearizeOpts lin;
    auto* c_lin = app.add_subcommand("linearize", "flatten a tagged corpus into token streams");
    c_lin->add_option("--in", lin.in, "tagged corpus (two-column)")->required();
    c_lin->add_option("--out", lin.out, "output stream file")->required();
    c_lin->add_option("--order", lin.order, "tag-word | word-tag")->check(CLI::IsMember(orders));
    c_lin->add_flag("--drop-o,!--keep-o", lin.drop_o, "omit O tags from the stream (default)");
    c_lin->add_option("--scheme", lin.scheme, "validate input against bio | iobes | token")
        ->check(CLI::IsMember(schemes));
    c_lin->add_option("--condition", lin.condition, "condition token prepended to every sequence")
        ->check(CLI::IsMember(conditions));

    TrainLmOpts tl;
    auto* c_tl = app.add_subcommand("train-lm", "train the sequence language model");
    c_tl->add_option("--train", tl.train, "linearized training file")->required();
    c_tl->add_option("--dev", tl.dev, "linearized dev file (default: held-out split)");
    c_tl->add_option("--dev-fraction", tl.dev_fraction, "held-out fraction when --dev is absent");
    c_tl->add_option("--tags-from", tl.tags_from, "corpus whose tagset is always kept in-vocab");
    c_tl->add_option("--tags", tl.tags, "comma-separated tag labels always kept in-vocab");
    c_tl->add_option("--out", tl.out, "checkpoint file")->required();
    c_tl->add_option("--log", tl.log, "epoch log file (default: <out>.log)");
    c_tl->add_option("--emb-dim", tl.emb_dim)->check(CLI::PositiveNumber);
    c_tl->add_option("--hidden-dim", tl.hidden_dim)->check(CLI::PositiveNumber);
    c_tl->add_option("--lr0", tl.lr0, "initial learning rate");
    c_tl->add_option("--lr-decay", tl.lr_decay, "rate multiplier after a flat epoch");
    c_tl->add_option("--batch", tl.batch)->check(CLI::PositiveNumber);
    c_tl->add_option("--max-epochs", tl.max_epochs)->check(CLI::PositiveNumber);
    c_tl->add_option("--patience", tl.patience, "consecutive flat epochs before stopping")
        ->check(CLI::PositiveNumber);
    c_tl->add_option("--dropout", tl.dropout);
    c_tl->add_option("--grad-clip", tl.grad_clip);
    c_tl->add_option("--min-count", tl.min_count, "vocabulary frequency threshold");
    c_tl->add_option("--seed", tl.seed);

    GenerateOpts gen;
    auto* c_gen = app.add_subcommand("generate", "sample synthetic sequences from a checkpoint");
    c_gen->add_option("--ckpt", gen.ckpt, "model checkpoint")->required();
    c_gen->add_option("--out", gen.out, "output stream file")->required();
    c_gen->add_option("--report", gen.report, "sampling report (default: <out>.report)");
    c_gen->add_option("--max-len", gen.max_len, "tokens per sequence, or 'auto'")
        ->check(max_len_check);
    c_gen->add_option("--temperature", gen.temperature, "softmax temperature; ~0 = argmax");
    c_gen->add_option("--batch", gen.batch, "sequences per saturation check")
        ->check(CLI::PositiveNumber);
    c_gen->add_option("--stop", gen.stop, "type-overlap ratio that stops sampling");
    c_gen->add_option("--max-batches", gen.max_batches)->check(CLI::PositiveNumber);
    c_gen->add_option("--condition", gen.condition, "condition token to generate under")
        ->check(CLI::IsMember(conditions));
    c_gen->add_option("--seed", gen.seed);
    c_gen->add_flag("--occurrence-weighted", gen.occurrence_weighted,
                    "weight the stop ratio by token occurrences, not types");

    CleanOpts cl;
    auto* c_cl = app.add_subcommand("clean", "delinearize and filter generated sequences");
    c_cl->add_option("--in", cl.in, "generated stream file")->required();
    c_cl->add_option("--out", cl.out, "surviving sentences (two-column)")->required();
    c_cl->add_option("--report", cl.report, "rejection report (default: <out>.report)");
    c_cl->add_option("--order", cl.order, "tag-word | word-tag")->check(CLI::IsMember(orders));
    c_cl->add_flag("--drop-o,!--keep-o", cl.drop_o, "streams were linearized without O tags");
    c_cl->add_option("--scheme", cl.scheme, "bio | iobes | token")
        ->required()
        ->check(CLI::IsMember(schemes));
    c_cl->add_option("--tags-from", cl.tags_from, "corpus providing the legal tagset");
    c_cl->add_option("--tags", cl.tags, "comma-separated legal tag labels");
    c_cl->add_option("--dedup-gold", cl.dedup_gold, "gold corpus joining duplicate/conflict checks");

    BuildKbOpts bk;
    auto* c_bk = app.add_subcommand("build-kb", "collect an entity gazetteer from gold spans");
    c_bk->add_option("--in", bk.in, "gold corpus")->required();
    c_bk->add_option("--out", bk.out, "gazetteer TSV")->required();
    c_bk->add_option("--min-freq", bk.min_freq, "occurrences needed to enter the gazetteer")
        ->check(CLI::PositiveNumber);

    AnnotateKbOpts ak;
    auto* c_ak = app.add_subcommand("annotate-kb", "tag raw text by longest gazetteer match");
    c_ak->add_option("--kb", ak.kb, "gazetteer TSV")->required();
    c_ak->add_option("--text", ak.text, "raw text, one tokenized sentence per line")->required();
    c_ak->add_option("--out", ak.out, "annotated corpus (two-column)")->required();

    WeakTagOpts wt;
    auto* c_wt = app.add_subcommand("weak-tag", "tag raw text with a trained tagger");
    c_wt->add_option("--model", wt.model, "tagger model file")->required();
    c_wt->add_option("--text", wt.text, "raw text, one tokenized sentence per line")->required();
    c_wt->add_option("--out", wt.out, "tagged corpus (two-column)")->required();

    AssembleOpts as;
    auto* c_as = app.add_subcommand("assemble", "mix gold and synthetic data into a training set");
    c_as->add_option("--gold", as.gold, "gold corpus")->required();
    c_as->add_option("--synthetic", as.synthetic, "synthetic corpus (optional for recipe gold)");
    c_as->add_option("--recipe", as.recipe, "training-set recipe")
        ->required()
        ->check(CLI::IsMember(recipes));
    c_as->add_option("--oversample", as.oversample, "gold repetition count")
        ->check(CLI::PositiveNumber);
    c_as->add_option("--cap", as.cap, "synthetic cap for gen_ud / gen_kb");
    c_as->add_option("--seed", as.seed);
    c_as->add_option("--out", as.out, "assembled corpus")->required();

    TrainTaggerOpts tt;
    auto* c_tt = app.add_subcommand("train-tagger", "train the evaluation tagger");
    c_tt->add_option("--train", tt.train, "training corpus")->required();
    c_tt->add_option("--out", tt.out, "model file")->required();
    c_tt->add_option("--epochs", tt.epochs)->check(CLI::PositiveNumber);
    c_tt->add_option("--seed", tt.seed);

    EvaluateOpts ev;
    auto* c_ev = app.add_subcommand("evaluate", "score predictions against gold");
    c_ev->add_option("--gold", ev.gold, "gold corpus")->required();
    c_ev->add_option("--pred", ev.pred, "predicted corpus, aligned with gold")->required();
    c_ev->add_option("--mode", ev.mode, "span | token")
        ->check(CLI::IsMember(std::vector<std::string>{"span", "token"}));
    c_ev->add_option("--out", ev.out, "also write the report here");

    DiversityOpts dv;
    auto* c_dv = app.add_subcommand("diversity", "compare generated data against gold");
    c_dv->add_option("--gold", dv.gold, "gold corpus")->required();
    c_dv->add_option("--generated", dv.generated, "generated corpus")->required();
    c_dv->add_flag("--type-insensitive", dv.type_insensitive,
                   "compare entity surfaces without their types");
    c_dv->add_option("--out", dv.out, "also write the report here");

    PipelineOpts pl;
    auto* c_pl = app.add_subcommand("pipeline", "run a full recipe end to end");
    c_pl->add_option("--recipe", pl.recipe, "training-set recipe")
        ->required()
        ->check(CLI::IsMember(recipes));
    c_pl->add_option("--gold", pl.gold, "gold training corpus")->required();
    c_pl->add_option("--test", pl.test, "evaluation corpus")->required();
    c_pl->add_option("--dev", pl.dev, "dev corpus for the language model");
    c_pl->add_option("--unlabeled", pl.unlabeled, "raw text for wt / kb / gen_ud / gen_kb");
    c_pl->add_option("--kb", pl.kb, "external gazetteer TSV (default: built from gold)");
    c_pl->add_option("--workdir", pl.workdir, "directory for all artifacts")->required();
    c_pl->add_option("--order", pl.order, "tag-word | word-tag")->check(CLI::IsMember(orders));
    c_pl->add_flag("--drop-o,!--keep-o", pl.drop_o, "omit O tags when linearizing");
    c_pl->add_option("--seed", pl.seed, "master seed; stages derive their own");
    c_pl->add_option("--emb-dim", pl.emb_dim)->check(CLI::PositiveNumber);
    c_pl->add_option("--hidden-dim", pl.hidden_dim)->check(CLI::PositiveNumber);
    c_pl->add_option("--lr0", pl.lr0);
    c_pl->add_option("--lr-decay", pl.lr_decay);
    c_pl->add_option("--lm-batch", pl.lm_batch)->check(CLI::PositiveNumber);
    c_pl->add_option("--max-epochs", pl.max_epochs)->check(CLI::PositiveNumber);
    c_pl->add_option("--patience", pl.patience)->check(CLI::PositiveNumber);
    c_pl->add_option("--dropout", pl.dropout);
    c_pl->add_option("--grad-clip", pl.grad_clip);
    c_pl->add_option("--min-count", pl.min_count);
    c_pl->add_option("--dev-fraction", pl.dev_fraction);
    c_pl->add_option("--max-len", pl.max_len)->check(max_len_check);
    c_pl->add_option("--temperature", pl.temperature);
    c_pl->add_option("--gen-batch", pl.gen_batch)->check(CLI::PositiveNumber);
    c_pl->add_option("--stop", pl.stop);
    c_pl->add_option("--max-batches", pl.max_batches)->check(CLI::PositiveNumber);
    c_pl->add_option("--tagger-epochs", pl.tagger_epochs)->check(CLI::PositiveNumber);
    c_pl->add_option("--oversample", pl.oversample)->check(CLI::PositiveNumber);
    c_pl->add_option("--cap", pl.cap);
    c_pl->add_option("--deletion-p", pl.deletion_p);
    c_pl->add_option("--rd-target", pl.rd_target, "deletion synthetic count (0 = recipe default)");
    c_pl->add_option("--kb-min-freq", pl.kb_min_freq)->check(CLI::PositiveNumber);

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->add_option("--config", config_file, "key=value defaults merged under explicit flags");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!config_file.empty()) {
            auto parsed = app.get_subcommands(); // the one that matched
            try {
                if (!parsed.empty()) apply_config(*parsed.front(), config_file);
            } catch (const CLI::ParseError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
        }
        if (*c_lin) return cmd_linearize(lin, threads);
        if (*c_tl) return cmd_train_lm(tl, threads);
        if (*c_gen) return cmd_generate(gen, threads);
        if (*c_cl) return cmd_clean(cl, threads);
        if (*c_bk) return cmd_build_kb(bk, threads);
        if (*c_ak) return cmd_annotate_kb(ak, threads);
        if (*c_wt) return cmd_weak_tag(wt, threads);
        if (*c_as) return cmd_assemble(as, threads);
        if (*c_tt) return cmd_train_tagger(tt, threads);
        if (*c_ev) return cmd_evaluate(ev, threads);
        if (*c_dv) return cmd_diversity(dv, threads);
        if (*c_pl) return cmd_pipeline(pl, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2; // unreachable with require_subcommand(1)
}

std::vector<std::string> manifest_argv(const std::string& manifest_text) {
    std::istringstream in(manifest_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("argv=", 0) != 0) continue;
        std::vector<std::string> out;
        std::string tok;
        std::istringstream row(line.substr(5));
        while (std::getline(row, tok, '\t')) out.push_back(tok);
        return out;
    }
    throw ParseError("manifest has no argv= line");
}

} // namespace tagaug
