#include "tagaug/generate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace tagaug {

namespace {

// Incremental LSTM state for token-at-a-time decoding.
struct DecodeState {
    std::vector<double> h, c;
    explicit DecodeState(int hidden) : h(size_t(hidden), 0.0), c(size_t(hidden), 0.0) {}
};

void step(const LMParams& p, DecodeState& st, int id, std::vector<double>& logits) {
    int d = p.emb_dim, r = p.hidden_dim, V = p.vocab_size;
    const double* e = p.emb.row(id);
    std::vector<double> h_new(size_t(r), 0.0), c_new(size_t(r), 0.0);
    for (int j = 0; j < r; ++j) {
        double ai = p.b_in[size_t(j)], af = p.b_forget[size_t(j)];
        double ag = p.b_cell[size_t(j)], ao = p.b_out_gate[size_t(j)];
        const double* wi = p.w_in.row(j);
        const double* wf = p.w_forget.row(j);
        const double* wg = p.w_cell.row(j);
        const double* wo = p.w_out.row(j);
        for (int k = 0; k < d; ++k) {
            ai += wi[k] * e[k];
            af += wf[k] * e[k];
            ag += wg[k] * e[k];
            ao += wo[k] * e[k];
        }
        const double* ui = p.u_in.row(j);
        const double* uf = p.u_forget.row(j);
        const double* ug = p.u_cell.row(j);
        const double* uo = p.u_out.row(j);
        for (int k = 0; k < r; ++k) {
            double hk = st.h[size_t(k)];
            ai += ui[k] * hk;
            af += uf[k] * hk;
            ag += ug[k] * hk;
            ao += uo[k] * hk;
        }
        double i_g = 1.0 / (1.0 + std::exp(-ai));
        double f_g = 1.0 / (1.0 + std::exp(-af));
        double g_g = std::tanh(ag);
        double o_g = 1.0 / (1.0 + std::exp(-ao));
        c_new[size_t(j)] = f_g * st.c[size_t(j)] + i_g * g_g;
        h_new[size_t(j)] = o_g * std::tanh(c_new[size_t(j)]);
    }
    st.h = std::move(h_new);
    st.c = std::move(c_new);
    logits.assign(p.proj_bias.begin(), p.proj_bias.end());
    for (int j = 0; j < r; ++j) {
        double hj = st.h[size_t(j)];
        const double* mrow = p.proj.row(j);
        for (int v = 0; v < V; ++v) logits[size_t(v)] += hj * mrow[v];
    }
}

// Draws one id from temperature-scaled softmax over the unmasked logits.
int draw(const std::vector<double>& logits, const std::vector<bool>& masked,
         double temperature, Rng& rng) {
    int V = int(logits.size());
    if (temperature < 1e-6) { // degenerate temperature: plain argmax
        int best = -1;
        for (int v = 0; v < V; ++v) {
            if (masked[size_t(v)]) continue;
            if (best < 0 || logits[size_t(v)] > logits[size_t(best)]) best = v;
        }
        return best;
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < V; ++v)
        if (!masked[size_t(v)]) mx = std::max(mx, logits[size_t(v)] / temperature);
    std::vector<double> w(size_t(V), 0.0);
    double z = 0;
    for (int v = 0; v < V; ++v) {
        if (masked[size_t(v)]) continue;
        w[size_t(v)] = std::exp(logits[size_t(v)] / temperature - mx);
        z += w[size_t(v)];
    }
    if (!(z > 0) || !std::isfinite(z)) {
        // all survivors underflowed (possible only with non-finite logits);
        // retry untempered, which is always well defined
        return draw(logits, masked, 1.0, rng);
    }
    double u = rng.uniform01() * z;
    double acc = 0;
    int last = -1;
    for (int v = 0; v < V; ++v) {
        if (masked[size_t(v)]) continue;
        acc += w[size_t(v)];
        last = v;
        if (u < acc) return v;
    }
    return last; // rounding pushed u past the final bucket
}

} // namespace

LinearizedSequence sample_sequence(const LMCheckpoint& ckpt, const GenConfig& cfg, Rng& rng) {
    if (cfg.max_len < 1) throw DomainError("max_len must be positive");
    const LMParams& p = ckpt.params;
    const Vocabulary& vocab = ckpt.vocab;
    std::vector<bool> masked(size_t(p.vocab_size), false);
    masked[Vocabulary::bos_id] = true;
    masked[Vocabulary::pad_id] = true;
    for (int id : vocab.condition_ids()) masked[size_t(id)] = true;

    DecodeState st(p.hidden_dim);
    std::vector<double> logits;
    LinearizedSequence out;

    int cond_id = -1;
    if (cfg.condition) {
        if (!vocab.contains(*cfg.condition))
            throw DomainError("condition token not in model vocabulary: " + *cfg.condition);
        cond_id = vocab.encode(*cfg.condition);
        out.push_back(*cfg.condition);
    }
    // priming order mirrors the training loader
    if (cond_id >= 0 && !ckpt.config.condition_after_bos) {
        step(p, st, cond_id, logits);
        step(p, st, Vocabulary::bos_id, logits);
    } else {
        step(p, st, Vocabulary::bos_id, logits);
        if (cond_id >= 0) step(p, st, cond_id, logits);
    }

    for (int n = 0; n < cfg.max_len; ++n) {
        int id = draw(logits, masked, cfg.temperature, rng);
        if (id == Vocabulary::eos_id) break;
        out.push_back(vocab.decode(id));
        if (n + 1 < cfg.max_len) step(p, st, id, logits);
    }
    return out;
}

double saturation_ratio(const std::vector<LinearizedSequence>& batch,
                        const std::set<std::string>& seen) {
    if (batch.empty()) throw DomainError("saturation ratio of an empty batch");
    std::set<std::string> types;
    for (const auto& seq : batch) types.insert(seq.begin(), seq.end());
    if (types.empty()) return 1.0;
    size_t overlap = 0;
    for (const auto& t : types) overlap += seen.count(t);
    return double(overlap) / double(types.size());
}

namespace {

double occurrence_ratio(const std::vector<LinearizedSequence>& batch,
                        const std::set<std::string>& seen) {
    size_t total = 0, old_occ = 0;
    for (const auto& seq : batch)
        for (const auto& tok : seq) {
            ++total;
            old_occ += seen.count(tok);
        }
    if (total == 0) return 1.0;
    return double(old_occ) / double(total);
}

// Fills batch[i] = sampler(first + i). Slot placement is by index, so the
// result does not depend on how work is split across threads.
std::vector<LinearizedSequence>
fill_batch(const std::function<LinearizedSequence(size_t)>& sampler,
           size_t first, int count, int threads) {
    std::vector<LinearizedSequence> batch;
    batch.resize(size_t(count));
    int nt = std::min(std::max(1, threads), count);
    if (nt == 1) {
        for (int i = 0; i < count; ++i) batch[size_t(i)] = sampler(first + size_t(i));
        return batch;
    }
    std::vector<std::exception_ptr> errs;
    errs.resize(size_t(nt));
    std::vector<std::thread> pool;
    pool.reserve(size_t(nt));
    for (int t = 0; t < nt; ++t) {
        int lo = int(int64_t(count) * t / nt);
        int hi = int(int64_t(count) * (t + 1) / nt);
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) batch[size_t(i)] = sampler(first + size_t(i));
            } catch (...) {
                errs[size_t(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    return batch;
}

} // namespace

std::pair<std::vector<LinearizedSequence>, GenReport>
generate_with_sampler(const std::function<LinearizedSequence(size_t)>& sampler,
                      const GenConfig& cfg) {
    if (cfg.batch_size < 1) throw DomainError("batch_size must be positive");
    if (cfg.max_batches < 1) throw DomainError("max_batches must be positive");
    std::vector<LinearizedSequence> all;
    GenReport report;
    std::set<std::string> seen;
    size_t index = 0;
    for (int b = 0; b < cfg.max_batches; ++b) {
        auto batch = fill_batch(sampler, index, cfg.batch_size, cfg.threads);
        index += size_t(cfg.batch_size);
        double ratio = cfg.occurrence_weighted ? occurrence_ratio(batch, seen)
                                               : saturation_ratio(batch, seen);
        report.ratios.push_back(ratio);
        ++report.batches;
        for (const auto& seq : batch) seen.insert(seq.begin(), seq.end());
        for (auto& seq : batch) all.push_back(std::move(seq));
        if (ratio > cfg.saturation_threshold) {
            report.saturated = true;
            break;
        }
    }
    report.sequences = all.size();
    report.distinct_types = seen.size();
    return {std::move(all), report};
}

std::pair<std::vector<LinearizedSequence>, GenReport>
generate_until_saturated(const LMCheckpoint& ckpt, const GenConfig& cfg) {
    auto sampler = [&](size_t index) {
        Rng rng(cfg.seed ^ uint64_t(index));
        return sample_sequence(ckpt, cfg, rng);
    };
    return generate_with_sampler(sampler, cfg);
}

} // namespace tagaug
